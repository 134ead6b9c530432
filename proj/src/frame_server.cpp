// Copyright (c) 2026 The sflf Authors.
// SPDX-License-Identifier: Apache-2.0

#include "sflf/frame_server.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "httplib.h"
#include "json.hpp"
#include "sflf/error.hpp"
#include "sflf/sf_core.hpp"

namespace sflf {

namespace {

using nlohmann::json;

HttpReply json_reply(int status, const json &body) { return {status, "application/json", body.dump(), {}}; }

HttpReply error_reply(const RequestError &e) {
    json body{{"error", e.message}};
    if (!e.field.empty()) body["field"] = e.field;
    return json_reply(e.status, body);
}

RequestError bad(std::string field, std::string message) { return {400, std::move(field), std::move(message)}; }

std::optional<Vec3> read_vec3(const json &j) {
    if (!j.is_array() || j.size() != 3) return std::nullopt;
    Vec3 v;
    double *dst[3] = {&v.x, &v.y, &v.z};
    for (int k = 0; k < 3; ++k) {
        if (!j[k].is_number()) return std::nullopt;
        *dst[k] = j[k].get<double>();
        if (!std::isfinite(*dst[k])) return std::nullopt;
    }
    return v;
}

}  // namespace

std::variant<PoseRequest, RequestError> parse_pose_request(const std::string &body) {
    const json j = json::parse(body, nullptr, false);
    if (j.is_discarded()) return bad("", "body is not valid JSON");
    if (!j.is_object()) return bad("", "body must be a JSON object");

    PoseRequest req;
    Vec3 eye, look_at, up{0.0, 0.0, 1.0};
    for (auto [name, dst, required] : {std::tuple{"eye", &eye, true}, std::tuple{"look_at", &look_at, true},
                                       std::tuple{"up", &up, false}}) {
        if (!j.contains(name)) {
            if (required) return bad(name, std::string("missing '") + name + "'");
            continue;
        }
        const auto v = read_vec3(j[name]);
        if (!v) return bad(name, std::string("'") + name + "' must be an array of 3 finite numbers");
        *dst = *v;
    }

    if (!j.contains("fov_deg")) return bad("fov_deg", "missing 'fov_deg'");
    if (!j["fov_deg"].is_number()) return bad("fov_deg", "'fov_deg' must be a number");
    const double fov = j["fov_deg"].get<double>();
    if (!(fov > 0.0 && fov < 180.0)) return bad("fov_deg", "'fov_deg' must be in (0, 180)");

    std::uint32_t size[2] = {};
    const char *size_names[2] = {"width", "height"};
    for (int k = 0; k < 2; ++k) {
        const char *name = size_names[k];
        if (!j.contains(name)) return bad(name, std::string("missing '") + name + "'");
        const json &v = j[name];
        if (!v.is_number_integer()) return bad(name, std::string("'") + name + "' must be an integer");
        const auto value = v.get<std::int64_t>();
        if (value > kMaxFrameSide)
            return RequestError{413, name, std::string("'") + name + "' exceeds " + std::to_string(kMaxFrameSide)};
        if (value < kMinFrameSide)
            return bad(name, std::string("'") + name + "' must be at least " + std::to_string(kMinFrameSide));
        size[k] = static_cast<std::uint32_t>(value);
    }

    if (j.contains("mode")) {
        const auto mode = j["mode"].is_string() ? parse_sample_mode(j["mode"].get<std::string>()) : std::nullopt;
        if (!mode) return bad("mode", "'mode' must be \"nearest\" or \"filtered\"");
        req.mode = *mode;
    }

    req.camera = Camera::from_degrees(eye, look_at, up, fov, size[0], size[1]);
    if (!(length(look_at - eye) > 0.0)) return bad("look_at", "'look_at' coincides with 'eye'");
    try {
        req.camera.validate();
    } catch (const ContractViolation &e) {
        return bad("up", e.what());
    }
    return req;
}

std::string metadata_json(const LightField &field) {
    nlohmann::ordered_json j;
    j["m"] = field.m();
    j["n"] = field.n();
    j["radius"] = field.radius();
    j["center"] = {field.center().x, field.center().y, field.center().z};
    j["hemisphere"] = field.hemisphere_only();
    j["texel_format"] = "RGBA8";
    j["suggested_orbit_radius"] = 2.5 * field.radius();
    return j.dump();
}

FrameServer::FrameServer(ServerOptions options) : options_(std::move(options)) {
    SFLF_REQUIRE(options_.workers >= 1, "server needs at least one worker");
    SFLF_REQUIRE(options_.port >= 0 && options_.port <= 65535, "port out of range");
}

FrameServer::~FrameServer() { stop(); }

void FrameServer::set_field(std::shared_ptr<const LightField> field) {
    std::lock_guard lock(mutex_);
    field_ = std::move(field);
    load_error_.clear();
}

void FrameServer::load_field_async(std::filesystem::path path) {
    set_field(nullptr);
    loader_ = std::jthread([this, path = std::move(path)] {
        try {
            auto field = std::make_shared<const LightField>(load(path));
            set_field(std::move(field));
        } catch (const std::exception &e) {
            std::lock_guard lock(mutex_);
            load_error_ = e.what();
        }
    });
}

void FrameServer::wait_for_load() {
    if (loader_.joinable()) loader_.join();
}

std::shared_ptr<const LightField> FrameServer::field() const {
    std::lock_guard lock(mutex_);
    return field_;
}

HttpReply FrameServer::unavailable() const {
    std::lock_guard lock(mutex_);
    json body{{"error", load_error_.empty() ? "light field is loading" : "light field failed to load: " + load_error_}};
    HttpReply reply = json_reply(503, body);
    reply.headers.emplace_back("Retry-After", "1");
    return reply;
}

HttpReply FrameServer::handle_metadata() const {
    const auto f = field();
    if (!f) return unavailable();
    return {200, "application/json", metadata_json(*f), {}};
}

HttpReply FrameServer::handle_frame(const std::string &body) const {
    const auto f = field();
    if (!f) return unavailable();
    auto parsed = parse_pose_request(body);
    if (auto *err = std::get_if<RequestError>(&parsed)) return error_reply(*err);
    const auto &req = std::get<PoseRequest>(parsed);

    const auto start = std::chrono::steady_clock::now();
    const FrameResult frame = render_frame(*f, req.camera, req.mode, options_.render_threads);
    std::vector<std::uint8_t> png = frame_png(frame);
    const auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - start).count();

    char coverage[32];
    std::snprintf(coverage, sizeof coverage, "%.3f", frame.coverage_percent());
    HttpReply reply{200, "image/png", std::string(png.begin(), png.end()), {}};
    reply.headers.emplace_back("X-Render-Micros", std::to_string(micros));
    reply.headers.emplace_back("X-Coverage-Percent", coverage);
    return reply;
}

int FrameServer::bind() {
    http_ = std::make_unique<httplib::Server>();
    const unsigned workers = options_.workers;
    http_->new_task_queue = [workers] { return new httplib::ThreadPool(workers); };

    const std::string origin = options_.allow_origin;
    auto send = [](httplib::Response &res, const HttpReply &reply) {
        res.status = reply.status;
        for (const auto &[k, v] : reply.headers) res.set_header(k, v);
        res.set_content(reply.body, reply.content_type);
    };
    http_->set_post_routing_handler([origin](const httplib::Request &, httplib::Response &res) {
        if (origin.empty()) return;
        res.set_header("Access-Control-Allow-Origin", origin);
        res.set_header("Access-Control-Expose-Headers", "X-Render-Micros, X-Coverage-Percent");
    });
    http_->Options(R"(/.*)", [origin](const httplib::Request &, httplib::Response &res) {
        res.status = 204;
        if (origin.empty()) return;
        res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
        res.set_header("Access-Control-Allow-Headers", "Content-Type");
    });
    http_->Get("/metadata", [this, send](const httplib::Request &, httplib::Response &res) {
        send(res, handle_metadata());
    });
    http_->Post("/frame", [this, send](const httplib::Request &req, httplib::Response &res) {
        send(res, handle_frame(req.body));
    });
    http_->set_exception_handler([](const httplib::Request &, httplib::Response &res, std::exception_ptr ep) {
        std::string what = "internal error";
        try {
            std::rethrow_exception(ep);
        } catch (const std::exception &e) {
            what = e.what();
        } catch (...) {
        }
        res.status = 500;
        res.set_content(json{{"error", what}}.dump(), "application/json");
    });

    int port = options_.port;
    if (port == 0) {
        port = http_->bind_to_any_port(options_.host);
        if (port < 0) throw std::runtime_error("cannot bind " + options_.host);
    } else if (!http_->bind_to_port(options_.host, port)) {
        throw std::runtime_error("cannot bind " + options_.host + ":" + std::to_string(port));
    }
    bound_ = true;
    return port;
}

void FrameServer::listen() {
    SFLF_REQUIRE(bound_, "bind() before listen()");
    http_->listen_after_bind();
}

void FrameServer::start() {
    if (!bound_) bind();
    listener_ = std::jthread([this] { http_->listen_after_bind(); });
    http_->wait_until_ready();
}

void FrameServer::stop() {
    if (http_) http_->stop();
    if (listener_.joinable()) listener_.join();
    if (loader_.joinable()) loader_.join();
}

}  // namespace sflf
