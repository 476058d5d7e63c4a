#include "matteforge/service.hpp"

#include <fstream>
#include <random>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

#include "matteforge/debug_dump.hpp"
#include "matteforge/error.hpp"

namespace matteforge::service {

namespace fs = std::filesystem;
using nlohmann::json;

struct Service::Revision {
    int number = 0;
    json record;
    std::map<std::string, io::Bytes> rasters;
};

struct Service::Session {
    std::string id;
    Image image;
    Clock::time_point created;
    std::mutex work;  // serializes segment/override

    mutable std::mutex data;  // guards everything below
    Clock::time_point last_access;
    bool busy = false;
    std::vector<std::shared_ptr<const Revision>> revisions;
    std::optional<CandidateSet> candidates;
    BoundingBox box;
};

namespace {

Response json_response(int status, const json& body) { return Response{status, "application/json", body.dump()}; }

Response error_response(int status, const std::string& message) {
    return json_response(status, json{{"error", message}});
}

Response pipeline_error(const Error& e) {
    return json_response(500, json{{"error", e.what()}, {"code", to_string(e.code())}, {"stage", e.stage()}});
}

std::string new_session_id() {
    static std::mutex mutex;
    static std::mt19937_64 engine{std::random_device{}()};
    std::lock_guard lock(mutex);
    std::ostringstream os;
    os << std::hex;
    for (int i = 0; i < 2; ++i) {
        os.width(16);
        os.fill('0');
        os << engine();
    }
    return os.str();
}

std::string raster_url(const std::string& id, const std::string& kind, int rev) {
    return "/v1/sessions/" + id + "/raster?kind=" + kind + "&rev=" + std::to_string(rev);
}

std::optional<json> parse_body(std::string_view body) {
    try {
        json doc = json::parse(body);
        if (doc.is_object()) return doc;
    } catch (const json::exception&) {
    }
    return std::nullopt;
}

std::optional<int> int_field(const json& doc, const char* name) {
    if (!doc.contains(name) || !doc[name].is_number_integer()) return std::nullopt;
    return doc[name].get<int>();
}

}  // namespace

Service::Service(ServiceConfig cfg) : cfg_(std::move(cfg)) {
    cfg_.pipeline.validate();
    if (cfg_.persist_dir) restore_from_disk();
}

Service::~Service() = default;

std::shared_ptr<Service::Session> Service::find(const std::string& id) {
    evict_expired();
    std::shared_lock lock(sessions_mutex_);
    const auto it = sessions_.find(id);
    if (it == sessions_.end()) return nullptr;
    std::lock_guard data(it->second->data);
    it->second->last_access = cfg_.now();
    return it->second;
}

size_t Service::evict_expired() {
    const auto now = cfg_.now();
    std::unique_lock lock(sessions_mutex_);
    size_t evicted = 0;
    for (auto it = sessions_.begin(); it != sessions_.end();) {
        bool expired;
        {
            std::lock_guard data(it->second->data);
            expired = !it->second->busy && now - it->second->last_access > cfg_.session_ttl;
        }
        if (expired) {
            if (cfg_.persist_dir) {
                std::error_code ec;
                fs::remove_all(*cfg_.persist_dir / it->first, ec);
            }
            it = sessions_.erase(it);
            ++evicted;
        } else {
            ++it;
        }
    }
    return evicted;
}

size_t Service::session_count() const {
    std::shared_lock lock(sessions_mutex_);
    return sessions_.size();
}

Response Service::upload(std::string_view body) {
    evict_expired();
    if (body.size() > cfg_.max_upload_bytes) return error_response(413, "upload exceeds the size limit");
    auto session = std::make_shared<Session>();
    try {
        session->image = io::decode_image(
            std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(body.data()), body.size()));
    } catch (const Error& e) {
        return error_response(400, e.what());
    }
    session->id = new_session_id();
    session->created = session->last_access = cfg_.now();
    persist_upload(*session, body);
    {
        std::unique_lock lock(sessions_mutex_);
        sessions_[session->id] = session;
    }
    return json_response(201, json{{"session_id", session->id},
                                   {"width", session->image.width()},
                                   {"height", session->image.height()}});
}

Response Service::describe(const std::string& id) {
    const auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    std::lock_guard data(s->data);
    json out{{"session_id", s->id},
             {"width", s->image.width()},
             {"height", s->image.height()},
             {"busy", s->busy},
             {"revision", s->revisions.empty() ? 0 : s->revisions.back()->number}};
    if (!s->revisions.empty()) out["latest"] = s->revisions.back()->record;
    return json_response(200, out);
}

Response Service::segment(const std::string& id, std::string_view body) {
    const auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    const auto doc = parse_body(body);
    if (!doc) return error_response(400, "body must be a JSON object");
    const auto x = int_field(*doc, "x"), y = int_field(*doc, "y"), w = int_field(*doc, "w"), h = int_field(*doc, "h");
    if (!x || !y || !w || !h) return error_response(400, "body needs integer x, y, w, h");
    const BoundingBox box{*x, *y, *w, *h};
    if (!box.valid_for(s->image.width(), s->image.height())) {
        return error_response(422, "bounding box must keep a 1 pixel margin inside the image");
    }

    std::lock_guard work(s->work);
    {
        std::lock_guard data(s->data);
        s->busy = true;
    }
    Response response;
    try {
        PipelineResult result = segment_image(s->image, box, cfg_.pipeline, std::nullopt,
                                              Deadline::after(cfg_.compute_timeout));
        response = publish_revision(*s, std::move(result), box);
    } catch (const Error& e) {
        response = e.code() == ErrorCode::InvalidBoundingBox && e.stage() == "validate"
                       ? error_response(422, e.what())
                       : pipeline_error(e);
    }
    std::lock_guard data(s->data);
    s->busy = false;
    return response;
}

Response Service::override_factor(const std::string& id, std::string_view body) {
    const auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    const auto doc = parse_body(body);
    if (!doc) return error_response(400, "body must be a JSON object");
    const auto factor = int_field(*doc, "factor");
    if (!factor) return error_response(400, "body needs an integer factor");

    std::lock_guard work(s->work);
    std::optional<CandidateSet> candidates;
    BoundingBox box;
    {
        std::lock_guard data(s->data);
        if (!s->candidates) return error_response(409, "segment this session before overriding");
        candidates = s->candidates;
        box = s->box;
        s->busy = true;
    }
    Response response;
    try {
        CandidateSet chosen = override_by_factor(*candidates, *factor);
        PipelineResult result = finish_from_candidates(s->image, box, std::move(chosen), cfg_.pipeline,
                                                       Deadline::after(cfg_.compute_timeout));
        response = publish_revision(*s, std::move(result), box);
    } catch (const Error& e) {
        response = e.code() == ErrorCode::InvalidOverride ? error_response(422, e.what()) : pipeline_error(e);
    }
    std::lock_guard data(s->data);
    s->busy = false;
    return response;
}

Response Service::publish_revision(Session& s, PipelineResult result, const BoundingBox& box) {
    auto rev = std::make_shared<Revision>();
    {
        std::lock_guard data(s.data);
        rev->number = s.revisions.empty() ? 1 : s.revisions.back()->number + 1;
    }
    const int w = s.image.width(), h = s.image.height();
    rev->rasters["mask"] = io::encode_mask_png(result.final_mask);
    rev->rasters["pre-refine"] = io::encode_mask_png(result.pre_refine_mask);
    rev->rasters["matte"] = io::encode_gray_png(w, h, result.matte.gray_values());
    rev->rasters["trimap"] = io::encode_gray_png(w, h, result.trimap.gray_values());

    json candidates = debug::candidate_manifest(result.candidates);
    for (size_t i = 0; i < result.candidates.candidates.size(); ++i) {
        const Candidate& c = result.candidates.candidates[i];
        if (c.skipped()) continue;
        const std::string kind = "candidate-" + std::to_string(c.factor);
        rev->rasters[kind] = debug::candidate_mask_png(c);
        candidates[i]["url"] = raster_url(s.id, kind, rev->number);
    }
    json urls = json::object();
    for (const char* kind : {"mask", "pre-refine", "matte", "trimap"}) urls[kind] = raster_url(s.id, kind, rev->number);
    rev->record = json{{"session_id", s.id},
                       {"revision", rev->number},
                       {"selected_factor", result.selected_factor()},
                       {"box", {{"x", box.x}, {"y", box.y}, {"w", box.w}, {"h", box.h}}},
                       {"candidates", std::move(candidates)},
                       {"urls", std::move(urls)},
                       {"matting_iterations", result.matting_iterations},
                       {"timings_ms", result.timings_ms}};
    persist_revision(s, *rev);

    std::lock_guard data(s.data);
    s.candidates = std::move(result.candidates);
    s.box = box;
    s.revisions.push_back(rev);
    return json_response(200, rev->record);
}

Response Service::raster(const std::string& id, const std::string& kind, const std::optional<std::string>& rev) {
    const auto s = find(id);
    if (!s) return error_response(404, "unknown session");
    std::shared_ptr<const Revision> revision;
    {
        std::lock_guard data(s->data);
        if (s->revisions.empty()) return error_response(404, "no results yet");
        if (!rev) {
            revision = s->revisions.back();
        } else {
            int n = 0;
            try {
                size_t used = 0;
                n = std::stoi(*rev, &used);
                if (used != rev->size()) n = 0;
            } catch (const std::exception&) {
            }
            for (const auto& r : s->revisions)
                if (r->number == n) revision = r;
            if (!revision) return error_response(404, "unknown revision");
        }
    }
    const auto it = revision->rasters.find(kind);
    if (it == revision->rasters.end()) return error_response(404, "no raster of kind '" + kind + "'");
    return Response{200, "image/png", std::string(it->second.begin(), it->second.end())};
}

void Service::persist_upload(const Session& s, std::string_view bytes) const {
    if (!cfg_.persist_dir) return;
    const fs::path dir = *cfg_.persist_dir / s.id;
    fs::create_directories(dir);
    std::ofstream(dir / "original.bin", std::ios::binary).write(bytes.data(), std::streamsize(bytes.size()));
}

void Service::persist_revision(const Session& s, const Revision& r) const {
    if (!cfg_.persist_dir) return;
    const fs::path dir = *cfg_.persist_dir / s.id / ("rev-" + std::to_string(r.number));
    fs::create_directories(dir);
    for (const auto& [kind, bytes] : r.rasters) io::write_file(dir / (kind + ".png"), bytes);
    std::ofstream(dir / "revision.json") << r.record.dump();
}

// Restored sessions serve their stored revisions; candidate sets are not
// persisted, so overriding requires a fresh segment call.
void Service::restore_from_disk() {
    std::error_code ec;
    if (!fs::is_directory(*cfg_.persist_dir, ec)) return;
    for (const auto& entry : fs::directory_iterator(*cfg_.persist_dir)) {
        if (!entry.is_directory() || !fs::exists(entry.path() / "original.bin")) continue;
        auto session = std::make_shared<Session>();
        try {
            session->image = io::read_image(entry.path() / "original.bin");
        } catch (const Error&) {
            continue;
        }
        session->id = entry.path().filename().string();
        session->created = session->last_access = cfg_.now();
        std::vector<std::shared_ptr<const Revision>> revisions;
        for (const auto& sub : fs::directory_iterator(entry.path())) {
            const std::string name = sub.path().filename().string();
            if (!sub.is_directory() || name.rfind("rev-", 0) != 0) continue;
            auto rev = std::make_shared<Revision>();
            try {
                rev->number = std::stoi(name.substr(4));
                std::ifstream in(sub.path() / "revision.json");
                rev->record = json::parse(in);
                for (const auto& file : fs::directory_iterator(sub.path())) {
                    if (file.path().extension() == ".png") {
                        rev->rasters[file.path().stem().string()] = io::read_file(file.path());
                    }
                }
            } catch (const std::exception&) {
                continue;
            }
            revisions.push_back(rev);
        }
        std::sort(revisions.begin(), revisions.end(), [](const auto& a, const auto& b) { return a->number < b->number; });
        session->revisions = std::move(revisions);
        sessions_[session->id] = session;
    }
}

void Service::mount(httplib::Server& server) {
    server.set_payload_max_length(cfg_.max_upload_bytes);
    server.set_default_headers({{"Access-Control-Allow-Origin", cfg_.cors_origin},
                                {"Access-Control-Allow-Methods", "GET, POST, OPTIONS"},
                                {"Access-Control-Allow-Headers", "Content-Type"}});
    const auto send = [](httplib::Response& res, const Response& r) {
        res.status = r.status;
        res.set_content(r.body, r.content_type);
    };
    server.Options(R"(/.*)", [](const httplib::Request&, httplib::Response& res) { res.status = 204; });
    server.Post("/v1/sessions", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, upload(req.body));
    });
    server.Get(R"(/v1/sessions/([0-9a-f]+))", [this, send](const httplib::Request& req, httplib::Response& res) {
        send(res, describe(req.matches[1]));
    });
    server.Post(R"(/v1/sessions/([0-9a-f]+)/segment)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                    send(res, segment(req.matches[1], req.body));
                });
    server.Post(R"(/v1/sessions/([0-9a-f]+)/override)",
                [this, send](const httplib::Request& req, httplib::Response& res) {
                    send(res, override_factor(req.matches[1], req.body));
                });
    server.Get(R"(/v1/sessions/([0-9a-f]+)/raster)", [this, send](const httplib::Request& req, httplib::Response& res) {
        std::optional<std::string> rev;
        if (req.has_param("rev")) rev = req.get_param_value("rev");
        send(res, raster(req.matches[1], req.get_param_value("kind"), rev));
    });
    server.set_error_handler([](const httplib::Request&, httplib::Response& res) {
        if (res.body.empty()) {
            res.set_content(json{{"error", httplib::status_message(res.status)}}.dump(), "application/json");
        }
    });
}

}  // namespace matteforge::service
