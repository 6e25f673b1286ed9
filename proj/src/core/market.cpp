#include "oiaudit/core/market.hpp"

#include <stdexcept>
#include <string>

namespace oiaudit {

std::string_view to_string(ContractKind k) noexcept {
    return k == ContractKind::INVERSE_PERP ? "INVERSE_PERP" : "LINEAR_PERP";
}

ContractKind parse_contract_kind(std::string_view text) {
    if (text == "LINEAR_PERP") return ContractKind::LINEAR_PERP;
    if (text == "INVERSE_PERP") return ContractKind::INVERSE_PERP;
    throw std::invalid_argument("unknown contract kind: " + std::string(text));
}

}  // namespace oiaudit
