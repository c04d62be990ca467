package shop.core;

import java.util.List;

public class Cart {
  private void add(Item item) {
    items.add(item);
    total = total + item.price();
  }

  public int total() {
    return total;
  }

  public void clear() {
    items.clear();
    total = 0;
  }
}

public class Checkout {
  public boolean pay(Cart cart, Wallet wallet) {
    if (wallet.balance() < cart.total()) {
      log("declined");
      return false;
    }
    wallet.charge(cart.total());
    cart.clear();
    return true;
  }

  void log(String message) {
    System.out.println("checkout: " + message);
  }
}
