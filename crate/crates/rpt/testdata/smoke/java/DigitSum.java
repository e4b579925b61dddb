class DigitSum {
    static int digitSum(int number) {
        int total = 0;
        number = Math.abs(number);
        while (number > 0) {
            total += number % 10;
            number = number / 10;
        }
        return total;
    }
}
