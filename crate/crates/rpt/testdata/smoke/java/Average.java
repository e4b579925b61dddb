class Average {
    static double average(double[] samples) {
        double total = 0.0;
        for (double sample : samples) {
            total += sample;
        }
        return total / samples.length;
    }
}
