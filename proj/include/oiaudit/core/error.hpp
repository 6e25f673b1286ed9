#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>

namespace oiaudit {

// Arithmetic between amounts of different units. Always a caller bug.
class UnitMismatch : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

// Malformed or insufficient input data (bad capture file, missing feeds,
// no coverage). Optionally carries the byte offset where it was detected.
class DataError : public std::runtime_error {
public:
    explicit DataError(const std::string& what, std::optional<std::uint64_t> offset = std::nullopt)
        : std::runtime_error(offset ? what + " (at offset " + std::to_string(*offset) + ")" : what),
          offset_(offset) {}

    [[nodiscard]] std::optional<std::uint64_t> offset() const noexcept { return offset_; }

private:
    std::optional<std::uint64_t> offset_;
};

}  // namespace oiaudit
