"""Bundled shopping-basket fixtures."""

from importlib import resources

# names of the fourteen shopper states, by value of s
SHOPPING_STATE_NAMES = {
    0: "BrowseShop",
    1: "LoggedIn",
    2: "SelectProduct",
    3: "AddToBasket",
    4: "DelFrBasket",
    5: "KeepShopping",
    6: "StartCheckout",
    7: "CancelOrder",
    8: "FillPaymentInfo",
    9: "FillInDeliveryInfo",
    10: "Authenticate",
    11: "ProcessOrder",
    12: "CompleteCheckout",
    13: "LoggedOut",
}


def fixture_path(name):
    """Filesystem path of a bundled fixture such as ``shopping_basket.pm``."""
    return resources.files("basketcheck") / "fixtures" / name


def read_fixture(name):
    return fixture_path(name).read_text(encoding="utf-8")
