class SumArray {
    static int Sum(int[] values) {
        int total = 0;
        for (int i = 0; i < values.Length; i++) {
            total = total + values[i];
        }
        return total;
    }
}
