#pragma once

#include <atomic>
#include <chrono>
#include <functional>
#include <string>
#include <thread>

#include <boost/asio/ip/tcp.hpp>
#include <boost/beast/core.hpp>
#include <boost/beast/http.hpp>
#include <boost/beast/websocket.hpp>

namespace oiaudit::testing {

namespace ws_mock {
namespace asio = boost::asio;
namespace beast = boost::beast;
namespace websocket = beast::websocket;
namespace http = beast::http;
using tcp = asio::ip::tcp;
}  // namespace ws_mock

/// Plain-TCP websocket server on 127.0.0.1 that runs a script per accepted
/// connection on its own thread. The listening socket can be closed and
/// reopened on the same port to simulate an outage.
class MockWsServer {
public:
    using Ws = ws_mock::websocket::stream<ws_mock::tcp::socket>;
    // Runs one connection; returns how long to stop listening afterwards.
    using Script = std::function<std::chrono::milliseconds(Ws&, int connection)>;

    MockWsServer() : acceptor_(ioc_) { open(0); }
    ~MockWsServer() { stop(); }

    [[nodiscard]] unsigned short port() const { return port_; }
    [[nodiscard]] std::string url(const std::string& target = "/ws") const {
        return "ws://127.0.0.1:" + std::to_string(port_) + target;
    }

    /// Serves websocket connections with `script` until stop().
    void serve(Script script) {
        thread_ = std::thread([this, script = std::move(script)] {
            struct Done {
                std::atomic<bool>& flag;
                ~Done() { flag = true; }
            } done{exited_};
            int n = 0;
            while (!stopping_) {
                boost::system::error_code ec;
                ws_mock::tcp::socket sock(ioc_);
                acceptor_.accept(sock, ec);
                if (ec) {
                    if (stopping_) return;
                    std::this_thread::sleep_for(std::chrono::milliseconds(5));
                    continue;
                }
                if (stopping_) return;
                std::chrono::milliseconds down{0};
                try {
                    Ws ws(std::move(sock));
                    ws.accept();
                    down = script(ws, n++);
                } catch (const std::exception&) {
                }
                if (down.count() > 0) outage(down);
            }
        });
    }

    /// Answers every upgrade request with `status` and no upgrade.
    void refuse_with(unsigned status) {
        thread_ = std::thread([this, status] {
            struct Done {
                std::atomic<bool>& flag;
                ~Done() { flag = true; }
            } done{exited_};
            while (!stopping_) {
                boost::system::error_code ec;
                ws_mock::tcp::socket sock(ioc_);
                acceptor_.accept(sock, ec);
                if (ec || stopping_) return;
                ++refusals_;
                ws_mock::beast::flat_buffer buf;
                ws_mock::http::request<ws_mock::http::string_body> req;
                ws_mock::http::read(sock, buf, req, ec);
                ws_mock::http::response<ws_mock::http::string_body> res{static_cast<ws_mock::http::status>(status), 11};
                res.body() = "denied";
                res.prepare_payload();
                ws_mock::http::write(sock, res, ec);
                sock.shutdown(ws_mock::tcp::socket::shutdown_both, ec);
            }
        });
    }

    void stop() {
        if (stopping_.exchange(true)) return;
        boost::system::error_code ec;
        // Unblock a pending accept; the server thread owns the acceptor.
        while (thread_.joinable() && !exited_) {
            ws_mock::asio::io_context poke_ctx;
            ws_mock::tcp::socket poke(poke_ctx);
            poke.connect({ws_mock::asio::ip::make_address("127.0.0.1"), port_}, ec);
            std::this_thread::sleep_for(std::chrono::milliseconds(5));
        }
        if (thread_.joinable()) thread_.join();
        acceptor_.close(ec);
    }

    [[nodiscard]] int refusals() const { return refusals_; }

private:
    // Stops listening for `ms`, refusing connections, then listens again.
    void outage(std::chrono::milliseconds ms) {
        boost::system::error_code ec;
        acceptor_.close(ec);
        std::this_thread::sleep_for(ms);
        open(port_);
    }

    void open(unsigned short port) {
        const ws_mock::tcp::endpoint ep{ws_mock::asio::ip::make_address("127.0.0.1"), port};
        acceptor_.open(ep.protocol());
        acceptor_.set_option(ws_mock::asio::socket_base::reuse_address(true));
        acceptor_.bind(ep);
        acceptor_.listen();
        port_ = acceptor_.local_endpoint().port();
    }

    ws_mock::asio::io_context ioc_;
    ws_mock::tcp::acceptor acceptor_;
    unsigned short port_ = 0;
    std::thread thread_;
    std::atomic<bool> stopping_{false};
    std::atomic<int> refusals_{0};
    std::atomic<bool> exited_{false};
};

}  // namespace oiaudit::testing
