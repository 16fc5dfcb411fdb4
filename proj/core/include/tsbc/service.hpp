#pragma once

#include <atomic>
#include <cstdint>
#include <mutex>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "tsbc/lwe.hpp"
#include "tsbc/params.hpp"
#include "tsbc/rlwe.hpp"
#include "tsbc/wire.hpp"

namespace tsbc::service {

/// Frame: length (4 bytes LE, payload only, <= 64 MiB), opcode (1 byte),
/// payload. EXTRACT payloads are wire objects; ERROR payloads are UTF-8
/// reason strings; PING carries none.
enum class Opcode : uint8_t {
    ping = 1,
    extract_request = 2,
    extract_response = 3,
    error = 4,
};

inline constexpr uint32_t kMaxPayloadBytes = 64u << 20;
inline constexpr int kDefaultTimeoutMs = 10000;

struct Frame {
    Opcode opcode;
    std::vector<uint8_t> payload;
};

class Error : public std::runtime_error {
public:
    enum class Cause {
        io,        // socket-level failure
        timeout,   // deadline expired
        protocol,  // malformed frame from the peer
        remote,    // peer replied with an ERROR frame
        oversized, // frame would exceed the payload limit
    };

    Error(Cause cause, const std::string& what)
        : std::runtime_error(what), cause_(cause) {}

    Cause cause() const noexcept { return cause_; }

private:
    Cause cause_;
};

struct Endpoint {
    std::string host;
    uint16_t port;
};

/// "host:port", with [bracketed] IPv6 hosts.
Endpoint parse_endpoint(std::string_view s);

/// Stateless extraction server: thread per connection, requests on one
/// connection served in order. Malformed payloads get an ERROR frame and
/// the connection stays usable; framing violations close it. No key
/// material is ever received: extraction works on ciphertexts alone, with
/// the parameters each request carries in its wire header.
class Server {
public:
    explicit Server(const Endpoint& bind_at, ParamSet advertised);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds and starts accepting. Throws Error{io} when unbindable.
    void start();

    /// Stops accepting, wakes workers, joins all threads. Idempotent.
    void stop();

    /// Bound port, available once started (useful when binding port 0).
    uint16_t port() const noexcept { return port_; }

    const ParamSet& advertised() const noexcept { return advertised_; }

private:
    void accept_loop();
    void serve_connection(int fd);

    Endpoint bind_at_;
    ParamSet advertised_;
    int listen_fd_ = -1;
    uint16_t port_ = 0;
    std::atomic<bool> stop_{false};
    bool started_ = false;
    std::thread accept_thread_;
    std::mutex workers_mu_;
    std::vector<std::thread> workers_;
};

/// One connection, one outstanding request at a time.
class Client {
public:
    explicit Client(const Endpoint& server, int timeout_ms = kDefaultTimeoutMs);
    ~Client();

    Client(const Client&) = delete;
    Client& operator=(const Client&) = delete;

    /// Sends one frame and waits for the reply frame.
    Frame call(const Frame& request);

    void close();

private:
    int fd_ = -1;
    int timeout_ms_;
};

/// Ships a TRLWE batch, returns the extracted TLWE batch. ERROR replies
/// surface as Error{remote}; oversized batches are rejected before
/// sending.
std::vector<TlweCiphertext> client_extract(const Endpoint& server,
                                           const std::vector<TrlweCiphertext>& cts,
                                           const ParamSet& ps,
                                           int timeout_ms = kDefaultTimeoutMs);

/// Round-trips an empty request; true on an ack.
bool ping(const Endpoint& server, int timeout_ms = kDefaultTimeoutMs);

}  // namespace tsbc::service
