#include "oiaudit/simulate/book.hpp"

#include <stdexcept>

namespace oiaudit::sim {
namespace {

Decimal positive_part(Decimal d) { return d.is_positive() ? d : Decimal{}; }

}  // namespace

Decimal PositionBook::trade(std::int64_t buyer, std::int64_t seller, Decimal size) {
    if (buyer == seller) throw std::invalid_argument("a trader cannot trade with itself");
    if (!size.is_positive()) throw std::invalid_argument("trade size must be positive");
    const Decimal before = longs_;
    shift(buyer, size);
    shift(seller, -size);
    return longs_ - before;
}

void PositionBook::shift(std::int64_t trader, Decimal by) {
    Decimal& p = pos_.at(static_cast<std::size_t>(trader));
    longs_ -= positive_part(p);
    shorts_ -= positive_part(-p);
    p += by;
    longs_ += positive_part(p);
    shorts_ += positive_part(-p);
}

}  // namespace oiaudit::sim
