#include "tsbc/service.hpp"

#include <fcntl.h>
#include <netdb.h>
#include <netinet/in.h>
#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <charconv>
#include <cstring>
#include <memory>
#include <utility>

#include "tsbc/adapter.hpp"

namespace tsbc::service {

namespace {

constexpr int kPollSliceMs = 250;  // stop-flag check period for server waits
constexpr size_t kFrameHeadBytes = 5;

[[noreturn]] void throw_errno(Error::Cause cause, const char* what) {
    throw Error(cause, std::string(what) + ": " + std::strerror(errno));
}

void set_nonblocking(int fd) {
    const int flags = ::fcntl(fd, F_GETFL, 0);
    if (flags < 0 || ::fcntl(fd, F_SETFL, flags | O_NONBLOCK) < 0)
        throw_errno(Error::Cause::io, "fcntl");
}

/// True when fd is ready for events, false on timeout.
bool wait_fd(int fd, short events, int timeout_ms) {
    pollfd p{fd, events, 0};
    for (;;) {
        const int rc = ::poll(&p, 1, timeout_ms);
        if (rc > 0) return true;
        if (rc == 0) return false;
        if (errno != EINTR) throw_errno(Error::Cause::io, "poll");
    }
}

struct AddrInfoDeleter {
    void operator()(addrinfo* p) const { ::freeaddrinfo(p); }
};

std::unique_ptr<addrinfo, AddrInfoDeleter> resolve(const Endpoint& ep,
                                                   bool passive) {
    addrinfo hints{};
    hints.ai_family = AF_UNSPEC;
    hints.ai_socktype = SOCK_STREAM;
    hints.ai_flags = passive ? AI_PASSIVE : 0;
    addrinfo* res = nullptr;
    const std::string port = std::to_string(ep.port);
    const char* host = ep.host.empty() ? nullptr : ep.host.c_str();
    const int rc = ::getaddrinfo(host, port.c_str(), &hints, &res);
    if (rc != 0)
        throw Error(Error::Cause::io,
                    "resolve " + ep.host + ": " + ::gai_strerror(rc));
    return std::unique_ptr<addrinfo, AddrInfoDeleter>(res);
}

void send_all(int fd, const uint8_t* data, size_t n, int timeout_ms) {
    size_t off = 0;
    while (off < n) {
        const ssize_t k = ::send(fd, data + off, n - off, MSG_NOSIGNAL);
        if (k > 0) {
            off += static_cast<size_t>(k);
            continue;
        }
        if (k < 0 && (errno == EAGAIN || errno == EWOULDBLOCK)) {
            if (!wait_fd(fd, POLLOUT, timeout_ms))
                throw Error(Error::Cause::timeout, "send timed out");
            continue;
        }
        if (k < 0 && errno == EINTR) continue;
        throw_errno(Error::Cause::io, "send");
    }
}

void recv_all(int fd, uint8_t* out, size_t n, int timeout_ms) {
    size_t off = 0;
    while (off < n) {
        const ssize_t k = ::recv(fd, out + off, n - off, 0);
        if (k > 0) {
            off += static_cast<size_t>(k);
            continue;
        }
        if (k == 0)
            throw Error(Error::Cause::io, "connection closed mid-frame");
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
            if (!wait_fd(fd, POLLIN, timeout_ms))
                throw Error(Error::Cause::timeout, "receive timed out");
            continue;
        }
        if (errno == EINTR) continue;
        throw_errno(Error::Cause::io, "recv");
    }
}

uint32_t get_le32(const uint8_t* p) {
    return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
           (static_cast<uint32_t>(p[2]) << 16) |
           (static_cast<uint32_t>(p[3]) << 24);
}

void send_frame(int fd, const Frame& f, int timeout_ms) {
    if (f.payload.size() > kMaxPayloadBytes)
        throw Error(Error::Cause::oversized, "frame exceeds payload limit");
    uint8_t head[kFrameHeadBytes];
    const uint32_t len = static_cast<uint32_t>(f.payload.size());
    for (int i = 0; i < 4; ++i) head[i] = static_cast<uint8_t>(len >> (8 * i));
    head[4] = static_cast<uint8_t>(f.opcode);
    send_all(fd, head, sizeof head, timeout_ms);
    if (!f.payload.empty())
        send_all(fd, f.payload.data(), f.payload.size(), timeout_ms);
}

Frame recv_frame(int fd, int timeout_ms) {
    uint8_t head[kFrameHeadBytes];
    recv_all(fd, head, sizeof head, timeout_ms);
    const uint32_t len = get_le32(head);
    if (len > kMaxPayloadBytes)
        throw Error(Error::Cause::protocol, "peer frame exceeds payload limit");
    if (head[4] < 1 || head[4] > 4)
        throw Error(Error::Cause::protocol, "unknown opcode from peer");
    Frame f{static_cast<Opcode>(head[4]), std::vector<uint8_t>(len)};
    if (len) recv_all(fd, f.payload.data(), len, timeout_ms);
    return f;
}

/// Server-side exact read: waits in short slices so stop() is honored.
/// False when the peer closed at a frame boundary or stop was requested.
bool recv_exact(int fd, uint8_t* out, size_t n, const std::atomic<bool>& stop) {
    size_t off = 0;
    while (off < n) {
        const ssize_t k = ::recv(fd, out + off, n - off, 0);
        if (k > 0) {
            off += static_cast<size_t>(k);
            continue;
        }
        if (k == 0) {
            if (off == 0) return false;
            throw Error(Error::Cause::protocol, "peer closed mid-frame");
        }
        if (errno == EAGAIN || errno == EWOULDBLOCK) {
            if (stop.load(std::memory_order_relaxed)) return false;
            wait_fd(fd, POLLIN, kPollSliceMs);
            continue;
        }
        if (errno == EINTR) continue;
        throw_errno(Error::Cause::io, "recv");
    }
    return true;
}

Frame error_frame(std::string_view reason) {
    return {Opcode::error, std::vector<uint8_t>(reason.begin(), reason.end())};
}

Frame handle_extract(const std::vector<uint8_t>& payload) {
    wire::TrlweBatch batch;
    try {
        batch = wire::deserialize_trlwe_batch(payload);
    } catch (const wire::Error& e) {
        return error_frame(e.what());
    }
    const ParamSet ps = batch.header.params();
    const uint64_t out_count = uint64_t{batch.header.count} * ps.n;
    if (wire::tlwe_bytes(ps.n, static_cast<uint32_t>(out_count)) >
        kMaxPayloadBytes)
        return error_frame("extracted batch exceeds the frame payload limit");
    std::vector<TlweCiphertext> out;
    out.reserve(out_count);
    for (const auto& ct : batch.cts) {
        auto part = trlwe_to_tlwes(ct, ps);
        std::move(part.begin(), part.end(), std::back_inserter(out));
    }
    return {Opcode::extract_response, wire::serialize_tlwe_batch(out, ps)};
}

Frame handle_request(Opcode op, const std::vector<uint8_t>& payload) {
    switch (op) {
        case Opcode::ping:
            return {Opcode::extract_response, {}};
        case Opcode::extract_request:
            return handle_extract(payload);
        case Opcode::extract_response:
        case Opcode::error:
            return error_frame("unexpected opcode in request");
    }
    return error_frame("unknown opcode");
}

}  // namespace

Endpoint parse_endpoint(std::string_view s) {
    std::string_view host, port_sv;
    if (!s.empty() && s.front() == '[') {
        const size_t close = s.find(']');
        if (close == std::string_view::npos || close + 1 >= s.size() ||
            s[close + 1] != ':')
            throw std::invalid_argument("endpoint: expected [host]:port");
        host = s.substr(1, close - 1);
        port_sv = s.substr(close + 2);
    } else {
        const size_t colon = s.rfind(':');
        if (colon == std::string_view::npos)
            throw std::invalid_argument("endpoint: expected host:port");
        host = s.substr(0, colon);
        port_sv = s.substr(colon + 1);
    }
    unsigned port = 0;
    const auto [end, ec] =
        std::from_chars(port_sv.data(), port_sv.data() + port_sv.size(), port);
    if (ec != std::errc{} || end != port_sv.data() + port_sv.size() ||
        port > 65535 || port_sv.empty())
        throw std::invalid_argument("endpoint: bad port");
    return {std::string(host), static_cast<uint16_t>(port)};
}

Server::Server(const Endpoint& bind_at, ParamSet advertised)
    : bind_at_(bind_at), advertised_(advertised) {}

Server::~Server() { stop(); }

void Server::start() {
    if (started_) throw Error(Error::Cause::io, "server already started");
    const auto ai = resolve(bind_at_, true);
    int last_errno = 0;
    for (const addrinfo* a = ai.get(); a; a = a->ai_next) {
        const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
        if (fd < 0) {
            last_errno = errno;
            continue;
        }
        const int one = 1;
        ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
        if (::bind(fd, a->ai_addr, a->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
            listen_fd_ = fd;
            break;
        }
        last_errno = errno;
        ::close(fd);
    }
    if (listen_fd_ < 0) {
        errno = last_errno;
        throw_errno(Error::Cause::io, "bind");
    }
    set_nonblocking(listen_fd_);

    sockaddr_storage ss{};
    socklen_t sl = sizeof ss;
    if (::getsockname(listen_fd_, reinterpret_cast<sockaddr*>(&ss), &sl) == 0) {
        if (ss.ss_family == AF_INET)
            port_ = ntohs(reinterpret_cast<sockaddr_in*>(&ss)->sin_port);
        else if (ss.ss_family == AF_INET6)
            port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&ss)->sin6_port);
    }
    started_ = true;
    accept_thread_ = std::thread([this] { accept_loop(); });
}

void Server::stop() {
    if (!started_ || stop_.exchange(true)) return;
    if (accept_thread_.joinable()) accept_thread_.join();
    if (listen_fd_ >= 0) {
        ::close(listen_fd_);
        listen_fd_ = -1;
    }
    std::vector<std::thread> ws;
    {
        std::lock_guard lk(workers_mu_);
        ws.swap(workers_);
    }
    for (auto& t : ws) t.join();
}

void Server::accept_loop() {
    while (!stop_.load(std::memory_order_relaxed)) {
        try {
            if (!wait_fd(listen_fd_, POLLIN, kPollSliceMs)) continue;
        } catch (const Error&) {
            break;
        }
        const int fd = ::accept(listen_fd_, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK ||
                errno == ECONNABORTED || errno == EINTR)
                continue;
            break;
        }
        std::lock_guard lk(workers_mu_);
        workers_.emplace_back([this, fd] { serve_connection(fd); });
    }
}

void Server::serve_connection(int fd) {
    try {
        set_nonblocking(fd);
        while (!stop_.load(std::memory_order_relaxed)) {
            uint8_t head[kFrameHeadBytes];
            if (!recv_exact(fd, head, sizeof head, stop_)) break;
            const uint32_t len = get_le32(head);
            const uint8_t op = head[4];
            if (len > kMaxPayloadBytes) {
                // The stream cannot be resynchronized past an oversized
                // announcement; report and drop the connection.
                send_frame(fd, error_frame("frame exceeds 64 MiB payload limit"),
                           kDefaultTimeoutMs);
                break;
            }
            std::vector<uint8_t> payload(len);
            if (len && !recv_exact(fd, payload.data(), len, stop_)) break;
            Frame reply = (op < 1 || op > 4)
                              ? error_frame("unknown opcode")
                              : handle_request(static_cast<Opcode>(op), payload);
            send_frame(fd, reply, kDefaultTimeoutMs);
        }
    } catch (const Error&) {
        // per-connection failure stays on this connection
    }
    ::close(fd);
}

Client::Client(const Endpoint& server, int timeout_ms)
    : timeout_ms_(timeout_ms) {
    const auto ai = resolve(server, false);
    int last_errno = 0;
    for (const addrinfo* a = ai.get(); a; a = a->ai_next) {
        const int fd = ::socket(a->ai_family, a->ai_socktype, a->ai_protocol);
        if (fd < 0) {
            last_errno = errno;
            continue;
        }
        try {
            set_nonblocking(fd);
        } catch (const Error&) {
            ::close(fd);
            throw;
        }
        if (::connect(fd, a->ai_addr, a->ai_addrlen) == 0) {
            fd_ = fd;
            break;
        }
        if (errno == EINPROGRESS) {
            bool ready = false;
            try {
                ready = wait_fd(fd, POLLOUT, timeout_ms_);
            } catch (const Error&) {
                ::close(fd);
                throw;
            }
            int soerr = 0;
            socklen_t sl = sizeof soerr;
            if (ready &&
                ::getsockopt(fd, SOL_SOCKET, SO_ERROR, &soerr, &sl) == 0 &&
                soerr == 0) {
                fd_ = fd;
                break;
            }
            last_errno = ready ? soerr : ETIMEDOUT;
        } else {
            last_errno = errno;
        }
        ::close(fd);
    }
    if (fd_ < 0) {
        errno = last_errno;
        if (last_errno == ETIMEDOUT)
            throw Error(Error::Cause::timeout, "connect timed out");
        throw_errno(Error::Cause::io, "connect");
    }
}

Client::~Client() { close(); }

void Client::close() {
    if (fd_ >= 0) {
        ::close(fd_);
        fd_ = -1;
    }
}

Frame Client::call(const Frame& request) {
    if (fd_ < 0) throw Error(Error::Cause::io, "client closed");
    send_frame(fd_, request, timeout_ms_);
    return recv_frame(fd_, timeout_ms_);
}

std::vector<TlweCiphertext> client_extract(const Endpoint& server,
                                           const std::vector<TrlweCiphertext>& cts,
                                           const ParamSet& ps, int timeout_ms) {
    auto bytes = wire::serialize_trlwe_batch(cts, ps);
    if (bytes.size() > kMaxPayloadBytes)
        throw Error(Error::Cause::oversized,
                    "request exceeds the frame payload limit");
    Client client(server, timeout_ms);
    const Frame reply =
        client.call({Opcode::extract_request, std::move(bytes)});
    if (reply.opcode == Opcode::error)
        throw Error(Error::Cause::remote,
                    std::string(reply.payload.begin(), reply.payload.end()));
    if (reply.opcode != Opcode::extract_response)
        throw Error(Error::Cause::protocol, "unexpected reply opcode");
    try {
        return wire::deserialize_tlwe_batch(reply.payload).cts;
    } catch (const wire::Error& e) {
        throw Error(Error::Cause::protocol, e.what());
    }
}

bool ping(const Endpoint& server, int timeout_ms) {
    Client client(server, timeout_ms);
    const Frame reply = client.call({Opcode::ping, {}});
    return reply.opcode == Opcode::extract_response && reply.payload.empty();
}

}  // namespace tsbc::service
