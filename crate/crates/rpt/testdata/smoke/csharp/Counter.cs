class Counter {
    private int count;

    Counter(int start) {
        this.count = start;
    }

    int Increment() {
        this.count = this.count + 1;
        return this.count;
    }
}
