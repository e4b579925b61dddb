class JoinWords {
    static string Join(string[] words, string separator) {
        StringBuilder builder = new StringBuilder();
        for (int i = 0; i < words.Length; i++) {
            if (i > 0) {
                builder.Append(separator);
            }
            builder.Append(words[i]);
        }
        return builder.ToString();
    }
}
