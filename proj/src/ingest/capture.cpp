#include "oiaudit/ingest/capture.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <spdlog/spdlog.h>
#include <zlib.h>

#include "oiaudit/core/error.hpp"

namespace oiaudit::ingest {
namespace {

constexpr std::size_t kFrameBytes = 18;  // 8 hex, tab, 8 hex, tab
constexpr std::size_t kPayloadFields = 10;

std::uint32_t crc_of(std::string_view bytes) {
    return static_cast<std::uint32_t>(
        crc32(0L, reinterpret_cast<const Bytef*>(bytes.data()), static_cast<uInt>(bytes.size())));
}

std::optional<std::uint32_t> parse_hex8(std::string_view s) {
    if (s.size() != 8) return std::nullopt;
    std::uint32_t v = 0;
    for (char c : s) {
        v <<= 4;
        if (c >= '0' && c <= '9') v |= static_cast<std::uint32_t>(c - '0');
        else if (c >= 'a' && c <= 'f') v |= static_cast<std::uint32_t>(c - 'a' + 10);
        else return std::nullopt;
    }
    return v;
}

template <class Int>
Int parse_int(std::string_view s, const char* what) {
    Int v{};
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) throw std::invalid_argument(std::string("bad ") + what);
    return v;
}

std::string encode_payload(const CaptureRecord& r) {
    const MarketEvent& e = r.event;
    std::string raw = r.raw.size() > CaptureRecord::kMaxRawBytes ? r.raw.substr(0, CaptureRecord::kMaxRawBytes) : r.raw;
    return fmt::format("{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}", r.recv_ts, e.ts, to_string(e.kind),
                       e.size_or_value.value().to_string(), e.price.to_string(), e.seq, to_string(e.ts_source),
                       e.gap_end, to_string(r.channel), escape_raw(raw));
}

CaptureRecord decode_payload(std::string_view p, const MarketId& market) {
    std::array<std::string_view, kPayloadFields> f;
    std::size_t n = 0;
    std::size_t start = 0;
    while (n < kPayloadFields) {
        const auto tab = p.find('\t', start);
        if (n + 1 == kPayloadFields) {
            f[n++] = p.substr(start);
            break;
        }
        if (tab == std::string_view::npos) throw std::invalid_argument("too few fields");
        f[n++] = p.substr(start, tab - start);
        start = tab + 1;
    }
    if (f[9].find('\t') != std::string_view::npos) throw std::invalid_argument("too many fields");

    CaptureRecord r;
    r.recv_ts = parse_int<EpochMs>(f[0], "recv_ts");
    MarketEvent& e = r.event;
    e.market = market;
    e.ts = parse_int<EpochMs>(f[1], "ts");
    e.kind = parse_event_kind(f[2]);
    e.size_or_value = Amount(Decimal::parse(f[3]), market.native_unit());
    e.price = Decimal::parse(f[4]);
    e.seq = parse_int<std::uint64_t>(f[5], "seq");
    e.ts_source = parse_ts_source(f[6]);
    e.gap_end = parse_int<EpochMs>(f[7], "gap_end");
    r.channel = parse_channel(f[8]);
    r.raw = unescape_raw(f[9]);
    return r;
}

MarketId decode_header(std::string_view line) {
    std::array<std::string_view, 4> f;
    std::size_t start = 0;
    for (std::size_t i = 0; i < f.size(); ++i) {
        const auto tab = line.find('\t', start);
        if ((tab == std::string_view::npos) != (i + 1 == f.size())) throw DataError("malformed capture header", 0);
        f[i] = line.substr(start, tab == std::string_view::npos ? std::string_view::npos : tab - start);
        start = tab + 1;
    }
    if (f[0] != kCaptureMagic) throw DataError("not a capture file or unsupported version", 0);
    try {
        return MarketId{std::string(f[1]), std::string(f[2]), parse_contract_kind(f[3])};
    } catch (const std::invalid_argument& e) {
        throw DataError(std::string("malformed capture header: ") + e.what(), 0);
    }
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open capture file " + path.string());
    std::string buf;
    in.seekg(0, std::ios::end);
    buf.resize(static_cast<std::size_t>(in.tellg()));
    in.seekg(0);
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    return buf;
}

enum class Damage { NONE, TORN, CORRUPT };

// Validates the record starting at `off`. On success sets `payload` and `next`.
Damage check_record(std::string_view buf, std::size_t off, std::string_view& payload, std::size_t& next) {
    const std::size_t left = buf.size() - off;
    if (left < kFrameBytes) return Damage::TORN;
    const auto len = parse_hex8(buf.substr(off, 8));
    const auto crc = parse_hex8(buf.substr(off + 9, 8));
    if (!len || !crc || buf[off + 8] != '\t' || buf[off + 17] != '\t') return Damage::CORRUPT;
    if (left < kFrameBytes + *len + 1) return Damage::TORN;
    payload = buf.substr(off + kFrameBytes, *len);
    if (buf[off + kFrameBytes + *len] != '\n' || crc_of(payload) != *crc) return Damage::CORRUPT;
    next = off + kFrameBytes + *len + 1;
    return Damage::NONE;
}

// A corrupt record is trailing when no further newline-terminated line
// follows it.
bool is_last_line(std::string_view buf, std::size_t off) {
    const auto nl = buf.find('\n', off);
    return nl == std::string_view::npos || nl + 1 >= buf.size();
}

ReplayResult scan(const std::filesystem::path& path, bool keep_records) {
    const std::string data = read_file(path);
    const std::string_view buf(data);
    const auto nl = buf.find('\n');
    if (nl == std::string_view::npos) throw DataError("capture file has no header: " + path.string(), 0);

    ReplayResult out;
    out.market = decode_header(buf.substr(0, nl));
    std::size_t off = nl + 1;
    out.valid_bytes = off;
    while (off < buf.size()) {
        std::string_view payload;
        std::size_t next = 0;
        const Damage d = check_record(buf, off, payload, next);
        if (d != Damage::NONE) {
            if (d == Damage::TORN || is_last_line(buf, off)) {
                spdlog::warn("{}: dropping damaged trailing record at offset {}", path.string(), off);
                out.truncated_at = off;
                break;
            }
            throw DataError("corrupt capture record in " + path.string(), off);
        }
        if (keep_records) {
            try {
                out.records.push_back(decode_payload(payload, out.market));
            } catch (const std::exception& e) {
                throw DataError(std::string("undecodable capture record: ") + e.what(), off);
            }
        }
        off = next;
        out.valid_bytes = off;
    }
    return out;
}

}  // namespace

std::string_view to_string(Channel c) noexcept {
    switch (c) {
        case Channel::WS: return "ws";
        case Channel::REST: return "rest";
        case Channel::GAP: return "gap";
        case Channel::SIM: return "sim";
    }
    return "?";
}

Channel parse_channel(std::string_view text) {
    if (text == "ws") return Channel::WS;
    if (text == "rest") return Channel::REST;
    if (text == "gap") return Channel::GAP;
    if (text == "sim") return Channel::SIM;
    throw std::invalid_argument("unknown channel: " + std::string(text));
}

std::string escape_raw(std::string_view raw) {
    std::string out;
    out.reserve(raw.size());
    for (char c : raw) {
        switch (c) {
            case '\\': out += "\\\\"; break;
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\r': out += "\\r"; break;
            default: out += c;
        }
    }
    return out;
}

std::string unescape_raw(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (std::size_t i = 0; i < text.size(); ++i) {
        if (text[i] != '\\') {
            out += text[i];
            continue;
        }
        if (++i == text.size()) throw std::invalid_argument("dangling escape");
        switch (text[i]) {
            case '\\': out += '\\'; break;
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case 'r': out += '\r'; break;
            default: throw std::invalid_argument("bad escape");
        }
    }
    return out;
}

std::string encode_header(const MarketId& market) {
    return fmt::format("{}\t{}\t{}\t{}\n", kCaptureMagic, market.exchange, market.symbol,
                       to_string(market.contract_kind));
}

std::string encode_record(const CaptureRecord& rec) {
    const std::string payload = encode_payload(rec);
    return fmt::format("{:08x}\t{:08x}\t{}\n", payload.size(), crc_of(payload), payload);
}

std::vector<MarketEvent> ReplayResult::events() const {
    std::vector<MarketEvent> out;
    out.reserve(records.size());
    for (const auto& r : records) out.push_back(r.event);
    return out;
}

ReplayResult replay(const std::filesystem::path& path) { return scan(path, true); }

MarketId read_capture_market(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open capture file " + path.string());
    std::string line;
    if (!std::getline(in, line) || in.eof()) throw DataError("capture file has no header: " + path.string(), 0);
    return decode_header(line);
}

CaptureWriter::CaptureWriter(const std::filesystem::path& path, const MarketId& market) : market_(market) {
    std::error_code ec;
    const bool fresh = !std::filesystem::exists(path, ec) || std::filesystem::file_size(path, ec) == 0;
    if (!fresh) {
        const ReplayResult existing = scan(path, false);
        if (existing.market != market) {
            throw DataError("capture file " + path.string() + " belongs to " + existing.market.key(), 0);
        }
        if (existing.truncated_at) std::filesystem::resize_file(path, existing.valid_bytes);
    }
    file_ = std::fopen(path.c_str(), fresh ? "wb" : "ab");
    if (!file_) throw DataError("cannot open capture file for writing: " + path.string());
    if (fresh) {
        const auto h = encode_header(market);
        std::fwrite(h.data(), 1, h.size(), file_);
    }
    buf_.reserve(1 << 20);
}

CaptureWriter::~CaptureWriter() {
    if (!file_) return;
    try {
        flush();
    } catch (...) {
    }
    std::fclose(file_);
}

void CaptureWriter::append(const CaptureRecord& rec) {
    if (rec.event.market != market_) throw std::invalid_argument("record market differs from capture market");
    buf_ += encode_record(rec);
    ++written_;
    if (buf_.size() >= (1u << 20)) flush();
}

void CaptureWriter::flush() {
    if (!buf_.empty() && std::fwrite(buf_.data(), 1, buf_.size(), file_) != buf_.size()) {
        throw DataError("short write to capture file");
    }
    buf_.clear();
    if (std::fflush(file_) != 0) throw DataError("flush of capture file failed");
}

}  // namespace oiaudit::ingest
