class MaxValue {
    static int Max(int[] numbers) {
        int best = numbers[0];
        for (int i = 1; i < numbers.Length; i++) {
            if (numbers[i] > best) {
                best = numbers[i];
            }
        }
        return best;
    }
}
