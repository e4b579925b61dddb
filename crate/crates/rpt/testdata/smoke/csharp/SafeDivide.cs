class SafeDivide {
    static int SafeDivide(int a, int b) {
        try {
            return a / b;
        } catch (DivideByZeroException e) {
            return 0;
        }
    }
}
