class Swap {
    static int[] swap(int[] pair) {
        int first = pair[0];
        pair[0] = pair[1];
        pair[1] = first;
        return pair;
    }
}
