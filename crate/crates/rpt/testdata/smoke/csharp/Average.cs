class Average {
    static double Mean(double[] samples) {
        double total = 0.0;
        foreach (double sample in samples) {
            total += sample;
        }
        return total / samples.Length;
    }
}
