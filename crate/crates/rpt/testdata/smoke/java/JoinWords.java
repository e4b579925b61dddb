class JoinWords {
    static String join(String[] words, String separator) {
        StringBuilder builder = new StringBuilder();
        for (int i = 0; i < words.length; i++) {
            if (i > 0) {
                builder.append(separator);
            }
            builder.append(words[i]);
        }
        return builder.toString();
    }
}
