class Swap {
    static int[] Swap(int[] pair) {
        int first = pair[0];
        pair[0] = pair[1];
        pair[1] = first;
        return pair;
    }
}
