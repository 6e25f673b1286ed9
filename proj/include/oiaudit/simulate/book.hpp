#pragma once

#include <cstdint>
#include <vector>

#include "oiaudit/core/decimal.hpp"

namespace oiaudit::sim {

/// Net signed positions of a trader population. Open interest is the total
/// long exposure, which always equals the total short exposure.
class PositionBook {
public:
    explicit PositionBook(std::int64_t n_traders) : pos_(static_cast<std::size_t>(n_traders)) {}

    [[nodiscard]] std::int64_t size() const noexcept { return static_cast<std::int64_t>(pos_.size()); }
    [[nodiscard]] Decimal position(std::int64_t trader) const { return pos_[static_cast<std::size_t>(trader)]; }
    [[nodiscard]] Decimal open_interest() const noexcept { return longs_; }
    [[nodiscard]] Decimal longs() const noexcept { return longs_; }
    [[nodiscard]] Decimal shorts() const noexcept { return shorts_; }

    /// `buyer` buys `size` from `seller`. Returns the signed OI change.
    Decimal trade(std::int64_t buyer, std::int64_t seller, Decimal size);

private:
    void shift(std::int64_t trader, Decimal by);

    std::vector<Decimal> pos_;
    Decimal longs_;
    Decimal shorts_;
};

}  // namespace oiaudit::sim
