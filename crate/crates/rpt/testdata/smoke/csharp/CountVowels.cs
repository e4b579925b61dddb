class CountVowels {
    static int CountVowels(string text) {
        int count = 0;
        for (int i = 0; i < text.Length; i++) {
            char c = text[i];
            if (c == 'a' || c == 'e' || c == 'i' || c == 'o' || c == 'u') {
                count++;
            }
        }
        return count;
    }
}
