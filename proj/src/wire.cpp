#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <climits>
#include <cstring>
#include <thread>

#include "json.hpp"
#include "mgcomm/comm_sim.hpp"
#include "mgcomm/error.hpp"

namespace mgcomm {

std::string encode_message(const Message& msg) {
  nlohmann::ordered_json j;
  j["topic"] = msg.topic;
  j["value"] = msg.value;
  j["slot"] = msg.slot;
  return j.dump();
}

Message decode_message(const std::string& line) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(line);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kParse, std::string("bad message: ") + e.what());
  }
  if (!j.is_object() || !j.contains("topic") || !j.contains("value") || !j.contains("slot") ||
      !j["topic"].is_string() || !j["value"].is_number() || !j["slot"].is_number_integer())
    throw Error(ErrorCode::kParse, "message needs string topic, numeric value and integer slot");
  return {j["topic"].get<std::string>(), j["value"].get<double>(), j["slot"].get<int>()};
}

namespace {

class Fd {
 public:
  explicit Fd(int fd = -1) : fd_(fd) {}
  Fd(const Fd&) = delete;
  Fd& operator=(const Fd&) = delete;
  ~Fd() { reset(); }
  int get() const { return fd_; }
  void reset() {
    if (fd_ >= 0) ::close(fd_);
    fd_ = -1;
  }

 private:
  int fd_;
};

void write_all(int fd, const std::string& data) {
  std::size_t off = 0;
  while (off < data.size()) {
    const ssize_t w = ::send(fd, data.data() + off, data.size() - off, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw Error(ErrorCode::kIo, std::string("socket write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(w);
  }
}

}  // namespace

std::vector<Delivery> route_over_socket(Broker& broker, const std::vector<Message>& messages) {
  int fds[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM, 0, fds) != 0)
    throw Error(ErrorCode::kIo, std::string("socketpair failed: ") + std::strerror(errno));
  Fd reader(fds[0]), writer(fds[1]);

  std::exception_ptr write_error;
  std::thread producer([&] {
    try {
      for (const auto& msg : messages) write_all(writer.get(), encode_message(msg) + "\n");
    } catch (...) {
      write_error = std::current_exception();
    }
    ::shutdown(writer.get(), SHUT_WR);
  });

  std::string buffer;
  int last_slot = INT_MIN;
  std::exception_ptr read_error;
  try {
    char chunk[4096];
    for (;;) {
      const ssize_t r = ::recv(reader.get(), chunk, sizeof chunk, 0);
      if (r < 0) {
        if (errno == EINTR) continue;
        throw Error(ErrorCode::kIo, std::string("socket read failed: ") + std::strerror(errno));
      }
      if (r == 0) break;
      buffer.append(chunk, static_cast<std::size_t>(r));
      std::size_t nl;
      while ((nl = buffer.find('\n')) != std::string::npos) {
        const Message msg = decode_message(buffer.substr(0, nl));
        buffer.erase(0, nl + 1);
        for (const auto& d : broker.route(msg)) last_slot = std::max(last_slot, d.deliver_slot);
      }
    }
    if (!buffer.empty()) throw Error(ErrorCode::kParse, "truncated message at end of stream");
  } catch (...) {
    read_error = std::current_exception();
    reader.reset();  // unblocks the producer
  }
  producer.join();
  if (read_error) std::rethrow_exception(read_error);
  if (write_error) std::rethrow_exception(write_error);
  if (last_slot == INT_MIN) return {};
  return broker.collect(last_slot);
}

}  // namespace mgcomm
