class ReverseString {
    static string Reverse(string text) {
        StringBuilder builder = new StringBuilder();
        for (int i = text.Length - 1; i >= 0; i--) {
            builder.Append(text[i]);
        }
        return builder.ToString();
    }
}
