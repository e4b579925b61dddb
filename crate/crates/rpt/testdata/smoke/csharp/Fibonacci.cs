class Fibonacci {
    static int Fib(int n) {
        int a = 0;
        int b = 1;
        while (n > 0) {
            int next = a + b;
            a = b;
            b = next;
            n = n - 1;
        }
        return a;
    }
}
