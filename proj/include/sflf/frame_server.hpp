// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#ifndef SFLF_FRAME_SERVER_HPP
#define SFLF_FRAME_SERVER_HPP

#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <utility>
#include <variant>
#include <vector>

#include "sflf/lightfield.hpp"
#include "sflf/render.hpp"

namespace httplib {
class Server;
}

namespace sflf {

inline constexpr std::uint32_t kMinFrameSide = 16;
inline constexpr std::uint32_t kMaxFrameSide = 2048;

struct PoseRequest {
    Camera camera;
    SampleMode mode = SampleMode::Filtered;
};

// A rejected request: HTTP status plus the offending field (may be empty).
struct RequestError {
    int status = 400;
    std::string field;
    std::string message;
};

// Parses a /frame body. `up` defaults to +z and `mode` to "filtered";
// everything else is required.
std::variant<PoseRequest, RequestError> parse_pose_request(const std::string &body);

struct HttpReply {
    int status = 200;
    std::string content_type;
    std::string body;
    std::vector<std::pair<std::string, std::string>> headers;
};

struct ServerOptions {
    std::string host = "127.0.0.1";
    int port = 8080;  // 0 picks a free port
    unsigned workers = 4;
    std::string allow_origin = "*";  // empty disables CORS headers
    unsigned render_threads = 1;     // per request
};

std::string metadata_json(const LightField &field);

class FrameServer {
  public:
    explicit FrameServer(ServerOptions options);
    ~FrameServer();
    FrameServer(const FrameServer &) = delete;
    FrameServer &operator=(const FrameServer &) = delete;

    void set_field(std::shared_ptr<const LightField> field);
    // Loads in the background; requests get 503 until it lands. A failed
    // load keeps answering 503 with the error in the body.
    void load_field_async(std::filesystem::path path);
    void wait_for_load();

    HttpReply handle_metadata() const;
    HttpReply handle_frame(const std::string &body) const;

    // Binds the socket and returns the port.
    int bind();
    // Serves until stop(); bind() first.
    void listen();
    void start();  // bind + listen on a background thread
    void stop();

  private:
    std::shared_ptr<const LightField> field() const;
    HttpReply unavailable() const;

    ServerOptions options_;
    mutable std::mutex mutex_;
    std::shared_ptr<const LightField> field_;
    std::string load_error_;
    std::jthread loader_;
    std::unique_ptr<httplib::Server> http_;
    std::jthread listener_;
    bool bound_ = false;
};

}  // namespace sflf

#endif  // SFLF_FRAME_SERVER_HPP
