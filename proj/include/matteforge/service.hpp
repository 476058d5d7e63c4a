#pragma once

#include <chrono>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include "matteforge/image_io.hpp"
#include "matteforge/pipeline.hpp"

namespace httplib {
class Server;
}

namespace matteforge::service {

using Clock = std::chrono::steady_clock;

struct ServiceConfig {
    PipelineConfig pipeline;
    size_t max_upload_bytes = 20u * 1024u * 1024u;
    std::chrono::seconds session_ttl{3600};
    std::chrono::milliseconds compute_timeout{120000};
    std::string cors_origin = "*";
    /// When set, sessions are mirrored to disk and reloaded at startup.
    std::optional<std::filesystem::path> persist_dir;
    /// Injectable for eviction tests.
    std::function<Clock::time_point()> now = [] { return Clock::now(); };
};

struct Response {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

/// The HTTP surface, callable directly (tests) or mounted on an httplib
/// server. Handlers are safe to call from any thread: distinct sessions run
/// in parallel and operations on one session serialize.
class Service {
public:
    explicit Service(ServiceConfig cfg);
    ~Service();

    Service(const Service&) = delete;
    Service& operator=(const Service&) = delete;

    /// POST /v1/sessions
    Response upload(std::string_view body);
    /// GET /v1/sessions/{id}
    Response describe(const std::string& id);
    /// POST /v1/sessions/{id}/segment with {"x","y","w","h"}
    Response segment(const std::string& id, std::string_view body);
    /// POST /v1/sessions/{id}/override with {"factor"}
    Response override_factor(const std::string& id, std::string_view body);
    /// GET /v1/sessions/{id}/raster?kind=...&rev=N; a missing rev means latest.
    Response raster(const std::string& id, const std::string& kind, const std::optional<std::string>& rev);

    /// Drops sessions idle for longer than the TTL; returns how many.
    size_t evict_expired();
    size_t session_count() const;

    /// Registers all routes, CORS headers and the upload size limit.
    void mount(httplib::Server& server);

private:
    struct Revision;
    struct Session;

    std::shared_ptr<Session> find(const std::string& id);
    Response publish_revision(Session& s, PipelineResult result, const BoundingBox& box);
    void persist_upload(const Session& s, std::string_view bytes) const;
    void persist_revision(const Session& s, const Revision& r) const;
    void restore_from_disk();

    ServiceConfig cfg_;
    mutable std::shared_mutex sessions_mutex_;
    std::map<std::string, std::shared_ptr<Session>> sessions_;
};

}  // namespace matteforge::service
