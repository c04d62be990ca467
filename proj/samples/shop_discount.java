package shop.core;

import java.util.List;

// Variant with a discount feature; copied from the basic shop and edited.
public class Cart {
  private void add(Item item) {
    items.add(item);
    total = total + item.price();
  }

  public int total() {
    return total - discount;
  }

  public void clear() {
    items.clear();
    total = 0;
  }

  public void applyDiscount(int percent) {
    discount = total * percent / 100;
    log("discount " + percent);
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

  public boolean payVoucher(Cart cart, Voucher voucher) {
    if (voucher.value() < cart.total()) {
      note("declined");
      return false;
    }
    voucher.redeem(cart.total());
    cart.clear();
    return true;
  }

  void log(String message) {
    System.out.println("checkout: " + message);
  }
}
