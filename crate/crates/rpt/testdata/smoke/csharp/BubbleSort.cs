class BubbleSort {
    static void Sort(int[] data) {
        for (int i = 0; i < data.Length; i++) {
            for (int j = 0; j < data.Length - 1 - i; j++) {
                if (data[j] > data[j + 1]) {
                    int tmp = data[j];
                    data[j] = data[j + 1];
                    data[j + 1] = tmp;
                }
            }
        }
    }
}
