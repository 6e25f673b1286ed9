#include "oiaudit/ingest/connector.hpp"

#include <chrono>
#include <deque>

#include <boost/asio/connect.hpp>
#include <boost/asio/ip/tcp.hpp>
#include <boost/asio/ssl.hpp>
#include <boost/asio/steady_timer.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/ssl.hpp>
#include <boost/beast/websocket.hpp>
#include <boost/beast/websocket/ssl.hpp>
#include <httplib.h>
#include <spdlog/spdlog.h>
#include <zlib.h>

namespace oiaudit::ingest {

namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace ssl = asio::ssl;
using tcp = asio::ip::tcp;
using boost::system::error_code;

namespace {

constexpr std::int64_t kRestTimeoutS = 5;

// Outcome of one websocket connection attempt.
struct SessionEnd {
    bool established = false;
    bool terminal = false;
    std::string error;
    EpochMs last_recv = 0;
    bool got_messages = false;
};

struct SessionHooks {
    const VenueDescriptor* venue = nullptr;
    const Url* url = nullptr;
    Clock clock;
    std::int64_t connect_timeout_ms = 0;
    std::function<void(EpochMs)> on_open;
    std::function<void(std::string_view, bool, EpochMs, const std::function<void(std::string)>&)> on_message;
};

// Runs handlers until `done` or until the context is stopped.
bool run_until(asio::io_context& ioc, const bool& done) {
    while (!done) {
        if (ioc.run_one() == 0) return false;
    }
    return true;
}

template <class Ws>
class Writer {
public:
    explicit Writer(Ws& ws) : ws_(ws) {}

    void send(std::string msg) {
        q_.push_back(std::move(msg));
        if (!busy_) next();
    }

private:
    void next() {
        if (q_.empty()) {
            busy_ = false;
            return;
        }
        busy_ = true;
        ws_.async_write(asio::buffer(q_.front()), [this](error_code ec, std::size_t) {
            if (ec) {
                busy_ = false;
                q_.clear();
                return;
            }
            q_.pop_front();
            next();
        });
    }

    Ws& ws_;
    std::deque<std::string> q_;
    bool busy_ = false;
};

// Websocket handshake, subscription and read loop on a connected stream.
template <class Ws>
void talk(Ws& ws, asio::io_context& ioc, const SessionHooks& h, SessionEnd& end) {
    websocket::stream_base::timeout opt{};
    opt.handshake_timeout = std::chrono::milliseconds(h.connect_timeout_ms);
    opt.idle_timeout = std::chrono::milliseconds(h.venue->idle_timeout_ms);
    opt.keep_alive_pings = false;
    ws.set_option(opt);
    ws.set_option(websocket::stream_base::decorator(
        [](websocket::request_type& req) { req.set(beast::http::field::user_agent, "oiaudit"); }));

    const Url& u = *h.url;
    const bool default_port = (u.tls() && u.port == "443") || (!u.tls() && u.port == "80");
    websocket::response_type res;
    bool done = false;
    error_code ec;
    ws.async_handshake(res, default_port ? u.host : u.host + ":" + u.port, u.target, [&](error_code e) {
        ec = e;
        done = true;
    });
    if (!run_until(ioc, done)) {
        end.error = "stopped";
        return;
    }
    if (ec) {
        const unsigned status = res.result_int();
        end.terminal = ec == websocket::error::upgrade_declined && status >= 400 && status < 500 && status != 429;
        end.error = "websocket handshake failed: " + ec.message() + (status ? " (HTTP " + std::to_string(status) + ")" : "");
        return;
    }

    end.established = true;
    end.last_recv = h.clock();
    h.on_open(end.last_recv);
    ws.text(true);
    Writer<Ws> writer(ws);
    for (const auto& s : h.venue->subscribe) writer.send(s);
    const std::function<void(std::string)> reply = [&](std::string r) { writer.send(std::move(r)); };

    asio::steady_timer heartbeat(ioc);
    std::function<void()> arm = [&] {
        heartbeat.expires_after(std::chrono::milliseconds(h.venue->heartbeat_ms));
        heartbeat.async_wait([&](error_code e) {
            if (e) return;
            writer.send(h.venue->heartbeat_message);
            arm();
        });
    };
    if (h.venue->heartbeat_ms > 0) arm();

    beast::flat_buffer buf;
    while (true) {
        done = false;
        ws.async_read(buf, [&](error_code e, std::size_t) {
            ec = e;
            done = true;
        });
        if (!run_until(ioc, done)) {
            end.error = "stopped";
            break;
        }
        if (ec) {
            end.error = "websocket read failed: " + ec.message();
            break;
        }
        const EpochMs now = h.clock();
        end.last_recv = now;
        end.got_messages = true;
        const std::string payload = beast::buffers_to_string(buf.data());
        buf.consume(buf.size());
        h.on_message(payload, !ws.got_text(), now, reply);
    }
    heartbeat.cancel();
}

SessionEnd connect_and_talk(asio::io_context& ioc, const SessionHooks& h, bool verify_tls) {
    // Without outstanding work the context would stop between steps; only
    // an explicit stop() may end the session.
    auto guard = asio::make_work_guard(ioc);
    SessionEnd end;
    const Url& u = *h.url;
    tcp::resolver resolver(ioc);
    tcp::resolver::results_type endpoints;
    bool done = false;
    error_code ec;
    resolver.async_resolve(u.host, u.port, [&](error_code e, tcp::resolver::results_type r) {
        ec = e;
        endpoints = std::move(r);
        done = true;
    });
    if (!run_until(ioc, done)) return {false, false, "stopped"};
    if (ec) return {false, false, "resolve failed: " + ec.message()};

    auto connect = [&](beast::tcp_stream& s) {
        s.expires_after(std::chrono::milliseconds(h.connect_timeout_ms));
        done = false;
        s.async_connect(endpoints, [&](error_code e, const tcp::endpoint&) {
            ec = e;
            done = true;
        });
        if (!run_until(ioc, done)) return std::string("stopped");
        s.expires_never();
        return ec ? "connect failed: " + ec.message() : std::string();
    };

    if (!u.tls()) {
        websocket::stream<beast::tcp_stream> ws(ioc);
        if (auto err = connect(beast::get_lowest_layer(ws)); !err.empty()) return {false, false, err};
        talk(ws, ioc, h, end);
        error_code ignored;
        beast::get_lowest_layer(ws).socket().close(ignored);
    } else {
        ssl::context ctx(ssl::context::tls_client);
        ctx.set_default_verify_paths();
        ctx.set_verify_mode(verify_tls ? ssl::verify_peer : ssl::verify_none);
        websocket::stream<beast::ssl_stream<beast::tcp_stream>> ws(ioc, ctx);
        if (!SSL_set_tlsext_host_name(ws.next_layer().native_handle(), u.host.c_str())) {
            return {false, false, "cannot set TLS server name"};
        }
        if (verify_tls) ws.next_layer().set_verify_callback(ssl::host_name_verification(u.host));
        if (auto err = connect(beast::get_lowest_layer(ws)); !err.empty()) return {false, false, err};
        beast::get_lowest_layer(ws).expires_after(std::chrono::milliseconds(h.connect_timeout_ms));
        done = false;
        ws.next_layer().async_handshake(ssl::stream_base::client, [&](error_code e) {
            ec = e;
            done = true;
        });
        if (!run_until(ioc, done)) return {false, false, "stopped"};
        beast::get_lowest_layer(ws).expires_never();
        if (ec) return {false, false, "TLS handshake failed: " + ec.message()};
        talk(ws, ioc, h, end);
        error_code ignored;
        beast::get_lowest_layer(ws).socket().close(ignored);
    }
    // Let aborted handlers finish while the locals they refer to are alive.
    guard.reset();
    ioc.restart();
    ioc.run_for(std::chrono::milliseconds(200));
    return end;
}

}  // namespace

struct Connector::WsState {
    std::mutex mu;
    asio::io_context* ioc = nullptr;
    bool stopped = false;

    void stop() {
        std::lock_guard lock(mu);
        stopped = true;
        if (ioc) ioc->stop();
    }
};

Url parse_url(std::string_view text) {
    Url u;
    const auto sep = text.find("://");
    if (sep == std::string_view::npos) throw std::invalid_argument("URL without scheme: " + std::string(text));
    u.scheme = std::string(text.substr(0, sep));
    if (u.scheme != "ws" && u.scheme != "wss" && u.scheme != "http" && u.scheme != "https") {
        throw std::invalid_argument("unsupported URL scheme: " + u.scheme);
    }
    std::string_view rest = text.substr(sep + 3);
    const auto slash = rest.find_first_of("/?");
    std::string_view authority = rest.substr(0, slash);
    u.target = slash == std::string_view::npos ? "/" : std::string(rest.substr(slash));
    if (u.target.front() == '?') u.target.insert(0, "/");
    const auto colon = authority.rfind(':');
    if (colon != std::string_view::npos) {
        u.host = std::string(authority.substr(0, colon));
        u.port = std::string(authority.substr(colon + 1));
        if (u.port.empty() || u.port.find_first_not_of("0123456789") != std::string::npos) {
            throw std::invalid_argument("bad port in URL: " + std::string(text));
        }
    } else {
        u.host = std::string(authority);
        u.port = u.tls() ? "443" : "80";
    }
    if (u.host.empty()) throw std::invalid_argument("URL without host: " + std::string(text));
    return u;
}

std::string gunzip(std::string_view data) {
    z_stream zs{};
    if (inflateInit2(&zs, 16 + MAX_WBITS) != Z_OK) throw std::runtime_error("inflateInit2 failed");
    zs.next_in = reinterpret_cast<Bytef*>(const_cast<char*>(data.data()));
    zs.avail_in = static_cast<uInt>(data.size());
    std::string out;
    char chunk[16384];
    int rc = Z_OK;
    while (rc == Z_OK) {
        zs.next_out = reinterpret_cast<Bytef*>(chunk);
        zs.avail_out = sizeof chunk;
        rc = inflate(&zs, Z_NO_FLUSH);
        if (rc != Z_OK && rc != Z_STREAM_END) {
            inflateEnd(&zs);
            throw std::runtime_error("gzip payload is corrupt");
        }
        out.append(chunk, sizeof chunk - zs.avail_out);
        if (rc == Z_OK && zs.avail_in == 0 && zs.avail_out != 0) {
            inflateEnd(&zs);
            throw std::runtime_error("gzip payload is truncated");
        }
    }
    inflateEnd(&zs);
    return out;
}

EpochMs wall_clock_ms() {
    using namespace std::chrono;
    return duration_cast<milliseconds>(system_clock::now().time_since_epoch()).count();
}

Connector::Connector(VenueDescriptor venue, MarketQueue& queue, DeadLetterWriter* dead_letters, ConnectorOptions opts)
    : normalizer_(std::move(venue)),
      queue_(queue),
      dead_letters_(dead_letters),
      opts_(std::move(opts)),
      ws_state_(std::make_shared<WsState>()) {
    if (queue_.market() != normalizer_.venue().market) throw std::invalid_argument("queue and venue markets differ");
    if (!normalizer_.venue().ws_endpoint.empty()) (void)parse_url(normalizer_.venue().ws_endpoint);
    if (!normalizer_.venue().rest_oi_endpoint.empty()) (void)parse_url(normalizer_.venue().rest_oi_endpoint);
}

Connector::~Connector() { stop(); }

void Connector::start() {
    if (ws_thread_.joinable() || rest_thread_.joinable()) throw std::logic_error("connector already started");
    const auto& v = normalizer_.venue();
    auto guarded = [this](void (Connector::*body)()) {
        return [this, body] {
            try {
                (this->*body)();
            } catch (const std::exception& e) {
                fail(e.what());
            }
        };
    };
    if (!v.ws_endpoint.empty()) ws_thread_ = std::thread(guarded(&Connector::run_ws));
    if (!v.rest_oi_endpoint.empty()) rest_thread_ = std::thread(guarded(&Connector::run_rest));
}

void Connector::stop() {
    stop_ = true;
    cv_.notify_all();
    ws_state_->stop();
    if (ws_thread_.joinable()) ws_thread_.join();
    if (rest_thread_.joinable()) rest_thread_.join();
}

std::optional<std::string> Connector::terminal_error() const {
    std::lock_guard lock(mu_);
    return terminal_;
}

ConnectorStats Connector::stats() const {
    std::lock_guard lock(mu_);
    return stats_;
}

void Connector::fail(std::string why) {
    spdlog::error("{}: {}", normalizer_.venue().market.key(), why);
    {
        std::lock_guard lock(mu_);
        if (!terminal_) terminal_ = std::move(why);
    }
    stop_ = true;
    cv_.notify_all();
    ws_state_->stop();
}

bool Connector::sleep_for_ms(std::int64_t ms) {
    std::unique_lock lock(mu_);
    return !cv_.wait_for(lock, std::chrono::milliseconds(ms), [&] { return stop_.load(); });
}

void Connector::emit_gap(EpochMs from, EpochMs to) {
    CaptureRecord rec;
    rec.recv_ts = to;
    rec.event = make_gap(normalizer_.venue().market, from, std::max(from, to), 0);
    rec.channel = Channel::GAP;
    queue_.push(std::move(rec));
    std::lock_guard lock(mu_);
    ++stats_.gaps;
}

void Connector::deliver(std::string_view payload, Channel channel, EpochMs recv_ts,
                        const std::function<void(std::string)>& reply) {
    const NormalizeResult r = normalizer_.normalize(payload, channel, recv_ts);
    std::uint64_t pushed = 0;
    switch (r.outcome) {
        case NormalizeResult::Outcome::EVENTS:
            for (const auto& e : r.events) {
                CaptureRecord rec;
                rec.recv_ts = recv_ts;
                rec.event = e;
                rec.channel = channel;
                // The payload is kept once, on the first event decoded from it.
                if (opts_.keep_raw && pushed == 0) rec.raw = std::string(payload.substr(0, CaptureRecord::kMaxRawBytes));
                queue_.push(std::move(rec));
                ++pushed;
            }
            break;
        case NormalizeResult::Outcome::REPLY:
            if (reply) reply(r.reply);
            break;
        case NormalizeResult::Outcome::DEAD_LETTER:
            spdlog::debug("{}: quarantined payload: {}", normalizer_.venue().market.key(), r.reason);
            if (dead_letters_) dead_letters_->write(recv_ts, r.reason, payload);
            break;
        case NormalizeResult::Outcome::IGNORED:
            break;
    }
    std::lock_guard lock(mu_);
    ++stats_.messages;
    stats_.events += pushed;
    stats_.ignored += r.outcome == NormalizeResult::Outcome::IGNORED;
    stats_.dead_letters += r.outcome == NormalizeResult::Outcome::DEAD_LETTER;
}

void Connector::run_ws() {
    const VenueDescriptor& v = normalizer_.venue();
    const Url url = parse_url(v.ws_endpoint);
    const std::string who = v.market.key();
    std::optional<EpochMs> outage_from;
    std::size_t attempt = 0;

    SessionHooks hooks;
    hooks.venue = &v;
    hooks.url = &url;
    hooks.clock = opts_.clock;
    hooks.connect_timeout_ms = opts_.connect_timeout_ms;
    hooks.on_open = [&](EpochMs now) {
        {
            std::lock_guard lock(mu_);
            ++stats_.sessions;
        }
        if (outage_from) {
            emit_gap(*outage_from, now);
            spdlog::info("{}: websocket back after {} ms", who, now - *outage_from);
            outage_from.reset();
        }
    };
    hooks.on_message = [&](std::string_view payload, bool binary, EpochMs now,
                           const std::function<void(std::string)>& reply) {
        if (binary && v.compression == Compression::GZIP) {
            std::string text;
            try {
                text = gunzip(payload);
            } catch (const std::exception& e) {
                if (dead_letters_) dead_letters_->write(now, e.what(), payload);
                std::lock_guard lock(mu_);
                ++stats_.dead_letters;
                return;
            }
            deliver(text, Channel::WS, now, reply);
        } else {
            deliver(payload, Channel::WS, now, reply);
        }
    };

    while (!stop_) {
        asio::io_context ioc;
        {
            std::lock_guard lock(ws_state_->mu);
            if (ws_state_->stopped) break;
            ws_state_->ioc = &ioc;
        }
        struct Detach {
            WsState& st;
            ~Detach() {
                std::lock_guard lock(st.mu);
                st.ioc = nullptr;
            }
        };
        SessionEnd end;
        {
            Detach detach{*ws_state_};
            end = connect_and_talk(ioc, hooks, opts_.verify_tls);
        }
        if (stop_) break;
        if (end.terminal) {
            fail(who + ": " + end.error);
            break;
        }
        if (end.established && !outage_from) outage_from = end.last_recv;
        if (end.got_messages) attempt = 0;
        const auto wait = v.reconnect_backoff_ms[std::min(attempt, v.reconnect_backoff_ms.size() - 1)];
        ++attempt;
        spdlog::warn("{}: {}; reconnecting in {} ms", who, end.error, wait);
        if (!sleep_for_ms(wait)) break;
    }
    if (outage_from) emit_gap(*outage_from, opts_.clock());
}

void Connector::run_rest() {
    const VenueDescriptor& v = normalizer_.venue();
    const Url url = parse_url(v.rest_oi_endpoint);
    const std::string who = v.market.key();
    httplib::Client cli(url.scheme + "://" + url.host + ":" + url.port);
    cli.set_connection_timeout(kRestTimeoutS);
    cli.set_read_timeout(kRestTimeoutS);
    cli.enable_server_certificate_verification(opts_.verify_tls);

    EpochMs outage_from = 0;  // 0 while polls succeed
    EpochMs last_ok = 0;
    auto next = std::chrono::steady_clock::now();
    while (!stop_) {
        const auto res = cli.Get(url.target);
        const EpochMs now = opts_.clock();
        if (res && res->status == 200) {
            if (outage_from > 0) {
                emit_gap(outage_from, now);
                outage_from = 0;
            }
            deliver(res->body, Channel::REST, now, {});
            last_ok = now;
            std::lock_guard lock(mu_);
            ++stats_.polls_ok;
        } else if (res && res->status >= 400 && res->status < 500 && res->status != 429) {
            fail(who + ": open interest poll rejected with HTTP " + std::to_string(res->status));
            break;
        } else {
            if (outage_from == 0) outage_from = last_ok;
            spdlog::warn("{}: open interest poll failed: {}", who,
                         res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error()));
            std::lock_guard lock(mu_);
            ++stats_.polls_failed;
        }
        next += std::chrono::milliseconds(v.oi_poll_ms);
        const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(next - std::chrono::steady_clock::now());
        if (left.count() <= 0) {
            next = std::chrono::steady_clock::now();
            continue;
        }
        if (!sleep_for_ms(left.count())) break;
    }
    if (outage_from > 0) emit_gap(outage_from, opts_.clock());
}

}  // namespace oiaudit::ingest
