class DigitSum {
    static int DigitSum(int number) {
        int total = 0;
        number = Math.Abs(number);
        while (number > 0) {
            total += number % 10;
            number = number / 10;
        }
        return total;
    }
}
