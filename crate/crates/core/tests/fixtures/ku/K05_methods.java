public final class Account {
    private static int created;
    private final String owner;
    private final int balance;

    static {
        created = 0;
    }

    public Account(String owner) {
        this(owner, 0);
    }

    public Account(String owner, int balance) {
        this.owner = owner;
        this.balance = balance;
    }

    public String getOwner() {
        return owner;
    }

    public int getBalance() {
        return balance;
    }

    static int total(int... amounts) {
        int sum = 0;
        return sum;
    }

    int add(int a, int b) {
        return a + b;
    }

    int add(int a) {
        return a;
    }
}
