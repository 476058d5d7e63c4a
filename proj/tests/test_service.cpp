#include <gtest/gtest.h>

#include <set>
#include <thread>

#include <httplib.h>
#include <json.hpp>

#include "matteforge/fixtures.hpp"
#include "matteforge/image_io.hpp"
#include "matteforge/service.hpp"
#include "temp_dir.hpp"

using namespace matteforge;
using namespace matteforge::service;
using nlohmann::json;

namespace {

struct Upload {
    std::string bytes;
    BoundingBox box;
};

// Disk seed 29 segments with factor 10 skipped and the other four viable.
const Upload& disk_upload() {
    static const Upload u = [] {
        const auto fx = fixtures::disk_on_texture(29);
        const io::Bytes png = io::encode_png(fx.image);
        return Upload{std::string(png.begin(), png.end()), fx.box};
    }();
    return u;
}

std::string box_body(const BoundingBox& b) { return json{{"x", b.x}, {"y", b.y}, {"w", b.w}, {"h", b.h}}.dump(); }

json body_of(const Response& r) { return json::parse(r.body); }

std::string new_session(Service& svc) {
    const Response r = svc.upload(disk_upload().bytes);
    EXPECT_EQ(r.status, 201) << r.body;
    return body_of(r)["session_id"];
}

// Shared segmented session; segmenting is the expensive part.
struct Segmented {
    Service svc{ServiceConfig{}};
    std::string id;
    json record;
};

Segmented& segmented() {
    static Segmented* s = [] {
        auto* out = new Segmented();
        out->id = new_session(out->svc);
        const Response r = out->svc.segment(out->id, box_body(disk_upload().box));
        EXPECT_EQ(r.status, 200) << r.body;
        out->record = body_of(r);
        return out;
    }();
    return *s;
}

}  // namespace

TEST(Service, UploadCreatesSession) {
    Service svc(ServiceConfig{});
    const Response r = svc.upload(disk_upload().bytes);
    ASSERT_EQ(r.status, 201);
    const json doc = body_of(r);
    const std::string id = doc["session_id"];
    EXPECT_EQ(id.size(), 32u);
    EXPECT_EQ(id.find_first_not_of("0123456789abcdef"), std::string::npos);
    EXPECT_EQ(doc["width"], 200);
    EXPECT_EQ(doc["height"], 200);
    EXPECT_EQ(svc.session_count(), 1u);
    const json d = body_of(svc.describe(id));
    EXPECT_EQ(d["revision"], 0);
    EXPECT_FALSE(d["busy"].get<bool>());
    EXPECT_FALSE(d.contains("latest"));
}

TEST(Service, UploadRejectsGarbageAndOversize) {
    Service svc(ServiceConfig{});
    EXPECT_EQ(svc.upload("definitely not an image").status, 400);
    EXPECT_EQ(svc.upload(std::string(20u * 1024u * 1024u + 1u, 'x')).status, 413);
    EXPECT_EQ(svc.session_count(), 0u);
}

TEST(Service, UnknownSession) {
    Service svc(ServiceConfig{});
    const std::string id(32, 'a');
    EXPECT_EQ(svc.describe(id).status, 404);
    EXPECT_EQ(svc.segment(id, box_body({5, 5, 10, 10})).status, 404);
    EXPECT_EQ(svc.override_factor(id, R"({"factor": 2})").status, 404);
    EXPECT_EQ(svc.raster(id, "mask", std::nullopt).status, 404);
}

TEST(Service, SegmentValidatesRequest) {
    Service svc(ServiceConfig{});
    const std::string id = new_session(svc);
    EXPECT_EQ(svc.segment(id, "nope").status, 400);
    EXPECT_EQ(svc.segment(id, R"({"x": 1, "y": 1, "w": 10})").status, 400);
    EXPECT_EQ(svc.segment(id, R"({"x": 1.5, "y": 1, "w": 10, "h": 10})").status, 400);
    EXPECT_EQ(svc.segment(id, box_body({0, 0, 200, 200})).status, 422);
    EXPECT_EQ(svc.segment(id, box_body({190, 190, 20, 20})).status, 422);
    EXPECT_EQ(svc.override_factor(id, R"({"factor": 2})").status, 409);
    EXPECT_EQ(svc.override_factor(id, R"({"factor": "2"})").status, 400);
    EXPECT_EQ(svc.raster(id, "mask", std::nullopt).status, 404);
}

TEST(Service, SegmentRecord) {
    const json& rec = segmented().record;
    EXPECT_EQ(rec["revision"], 1);
    ASSERT_EQ(rec["candidates"].size(), 5u);
    EXPECT_TRUE(rec["candidates"][4]["skipped"].get<bool>());
    EXPECT_FALSE(rec["candidates"][4].contains("url"));
    EXPECT_TRUE(rec["candidates"][0].contains("url"));
    for (const char* kind : {"mask", "pre-refine", "matte", "trimap"}) EXPECT_TRUE(rec["urls"].contains(kind)) << kind;
    EXPECT_EQ(rec["box"]["w"], disk_upload().box.w);
    EXPECT_GT(rec["matting_iterations"].get<int>(), 0);
    const json d = body_of(segmented().svc.describe(segmented().id));
    EXPECT_EQ(d["revision"], 1);
    EXPECT_EQ(d["latest"], rec);
}

TEST(Service, Rasters) {
    auto& s = segmented();
    const Response mask = s.svc.raster(s.id, "mask", std::nullopt);
    ASSERT_EQ(mask.status, 200);
    EXPECT_EQ(mask.content_type, "image/png");
    EXPECT_EQ(s.svc.raster(s.id, "mask", "1").body, mask.body);
    EXPECT_EQ(s.svc.raster(s.id, "mask", std::nullopt).body, mask.body);

    const Response trimap = s.svc.raster(s.id, "trimap", "1");
    ASSERT_EQ(trimap.status, 200);
    const auto gray = io::decode_gray_png(io::Bytes(trimap.body.begin(), trimap.body.end()));
    const std::set<std::uint8_t> levels(gray.values.begin(), gray.values.end());
    EXPECT_EQ(levels, (std::set<std::uint8_t>{0, 128, 255}));

    EXPECT_EQ(s.svc.raster(s.id, "candidate-2", "1").status, 200);
    EXPECT_EQ(s.svc.raster(s.id, "candidate-10", "1").status, 404);
    EXPECT_EQ(s.svc.raster(s.id, "banana", "1").status, 404);
    EXPECT_EQ(s.svc.raster(s.id, "mask", "99").status, 404);
    EXPECT_EQ(s.svc.raster(s.id, "mask", "1x").status, 404);
    EXPECT_EQ(s.svc.raster(s.id, "mask", "").status, 404);
}

TEST(Service, OverrideKeepsCandidatesAndAddsRevisions) {
    Service svc(ServiceConfig{});
    const std::string id = new_session(svc);
    const json first = body_of(svc.segment(id, box_body(disk_upload().box)));
    const int selected = first["selected_factor"];

    const Response same = svc.override_factor(id, json{{"factor", selected}}.dump());
    ASSERT_EQ(same.status, 200) << same.body;
    EXPECT_EQ(body_of(same)["revision"], 2);
    for (const char* kind : {"mask", "matte", "trimap", "pre-refine"})
        EXPECT_EQ(svc.raster(id, kind, "1").body, svc.raster(id, kind, "2").body) << kind;
    for (size_t i = 0; i < 5; ++i) EXPECT_EQ(body_of(same)["candidates"][i]["score"], first["candidates"][i]["score"]);

    const int other = selected == 2 ? 4 : 2;
    const Response moved = svc.override_factor(id, json{{"factor", other}}.dump());
    ASSERT_EQ(moved.status, 200);
    const json rec = body_of(moved);
    EXPECT_EQ(rec["revision"], 3);
    EXPECT_EQ(rec["selected_factor"], other);
    for (size_t i = 0; i < 5; ++i) {
        EXPECT_EQ(rec["candidates"][i]["patch_count"], first["candidates"][i]["patch_count"]);
        EXPECT_EQ(rec["candidates"][i]["selected"].get<bool>(), rec["candidates"][i]["factor"] == other);
    }
    EXPECT_EQ(svc.raster(id, "mask", std::nullopt).body, svc.raster(id, "mask", "3").body);

    EXPECT_EQ(svc.override_factor(id, R"({"factor": 10})").status, 422);
    EXPECT_EQ(svc.override_factor(id, R"({"factor": 3})").status, 422);
    EXPECT_EQ(body_of(svc.describe(id))["revision"], 3);
}

TEST(Service, PipelineErrorsReportStage) {
    Service svc(ServiceConfig{});
    const io::Bytes png = io::encode_png(Image(60, 60));
    const std::string id = body_of(svc.upload(std::string(png.begin(), png.end())))["session_id"];
    const Response r = svc.segment(id, box_body({10, 10, 40, 40}));
    EXPECT_EQ(r.status, 500);
    const json doc = body_of(r);
    EXPECT_EQ(doc["code"], "NoViableCandidate");
    EXPECT_EQ(doc["stage"], "candidates");
    EXPECT_FALSE(body_of(svc.describe(id))["busy"].get<bool>());
}

TEST(Service, EvictsIdleSessions) {
    auto now = std::make_shared<Clock::time_point>(Clock::now());
    ServiceConfig cfg;
    cfg.session_ttl = std::chrono::seconds(60);
    cfg.now = [now] { return *now; };
    Service svc(cfg);
    const std::string a = new_session(svc);
    *now += std::chrono::seconds(30);
    const std::string b = new_session(svc);
    *now += std::chrono::seconds(20);
    EXPECT_EQ(svc.describe(a).status, 200);  // touches a at t=50
    *now += std::chrono::seconds(40);
    EXPECT_EQ(svc.evict_expired(), 0u);
    *now += std::chrono::seconds(5);
    EXPECT_EQ(svc.evict_expired(), 1u);  // b idle 65 s, a idle 45 s
    EXPECT_EQ(svc.describe(b).status, 404);
    EXPECT_EQ(svc.describe(a).status, 200);
    *now += std::chrono::seconds(61);
    EXPECT_EQ(svc.describe(a).status, 404);
    EXPECT_EQ(svc.session_count(), 0u);
}

TEST(Service, PersistsAndRestores) {
    TempDir tmp;
    ServiceConfig cfg;
    cfg.persist_dir = tmp.path();
    std::string id;
    std::string mask;
    {
        Service svc(cfg);
        id = new_session(svc);
        ASSERT_EQ(svc.segment(id, box_body(disk_upload().box)).status, 200);
        mask = svc.raster(id, "mask", std::nullopt).body;
    }
    Service restored(cfg);
    EXPECT_EQ(restored.session_count(), 1u);
    EXPECT_EQ(restored.raster(id, "mask", "1").body, mask);
    EXPECT_EQ(restored.raster(id, "candidate-2", std::nullopt).status, 200);
    EXPECT_EQ(body_of(restored.describe(id))["revision"], 1);
    EXPECT_EQ(restored.override_factor(id, R"({"factor": 2})").status, 409);
    ASSERT_EQ(restored.segment(id, box_body(disk_upload().box)).status, 200);
    EXPECT_EQ(body_of(restored.describe(id))["revision"], 2);
    EXPECT_EQ(restored.override_factor(id, R"({"factor": 2})").status, 200);
}

TEST(Service, ParallelSessions) {
    Service svc(ServiceConfig{});
    const auto fx = fixtures::disk_on_texture(2, 100);
    const io::Bytes png = io::encode_png(fx.image);
    const std::string body(png.begin(), png.end());
    std::vector<std::string> ids;
    for (int i = 0; i < 3; ++i) ids.push_back(body_of(svc.upload(body))["session_id"]);
    std::vector<int> status(3);
    std::vector<std::thread> threads;
    for (size_t i = 0; i < 3; ++i)
        threads.emplace_back([&, i] { status[i] = svc.segment(ids[i], box_body(fx.box)).status; });
    for (auto& t : threads) t.join();
    EXPECT_EQ(status, (std::vector<int>{200, 200, 200}));
    EXPECT_EQ(svc.raster(ids[0], "mask", std::nullopt).body, svc.raster(ids[2], "mask", std::nullopt).body);
}

TEST(ServiceHttp, RoutesOverHttp) {
    ServiceConfig cfg;
    cfg.cors_origin = "http://localhost:5173";
    Service svc(cfg);
    httplib::Server server;
    svc.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    ASSERT_GT(port, 0);
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();

    httplib::Client client("127.0.0.1", port);
    client.set_read_timeout(120, 0);
    const auto up = client.Post("/v1/sessions", disk_upload().bytes, "image/png");
    ASSERT_TRUE(up);
    ASSERT_EQ(up->status, 201);
    EXPECT_EQ(up->get_header_value("Access-Control-Allow-Origin"), "http://localhost:5173");
    const std::string id = json::parse(up->body)["session_id"];

    const auto seg = client.Post("/v1/sessions/" + id + "/segment", box_body(disk_upload().box), "application/json");
    ASSERT_TRUE(seg);
    ASSERT_EQ(seg->status, 200) << seg->body;
    const json rec = json::parse(seg->body);

    const auto mask = client.Get(rec["urls"]["mask"].get<std::string>());
    ASSERT_TRUE(mask);
    EXPECT_EQ(mask->status, 200);
    EXPECT_EQ(mask->get_header_value("Content-Type"), "image/png");
    EXPECT_EQ(mask->body, svc.raster(id, "mask", "1").body);

    const auto latest = client.Get("/v1/sessions/" + id + "/raster?kind=trimap");
    ASSERT_TRUE(latest);
    EXPECT_EQ(latest->status, 200);

    const auto over = client.Post("/v1/sessions/" + id + "/override", R"({"factor": 2})", "application/json");
    ASSERT_TRUE(over);
    EXPECT_EQ(over->status, 200);
    const auto desc = client.Get("/v1/sessions/" + id);
    ASSERT_TRUE(desc);
    EXPECT_EQ(json::parse(desc->body)["revision"], 2);

    const auto preflight = client.Options("/v1/sessions");
    ASSERT_TRUE(preflight);
    EXPECT_EQ(preflight->status, 204);
    EXPECT_NE(preflight->get_header_value("Access-Control-Allow-Methods").find("POST"), std::string::npos);

    const auto missing = client.Get("/v1/nothing");
    ASSERT_TRUE(missing);
    EXPECT_EQ(missing->status, 404);
    EXPECT_TRUE(json::parse(missing->body).contains("error"));

    const auto bad = client.Post("/v1/sessions/" + id + "/segment", "{}", "application/json");
    ASSERT_TRUE(bad);
    EXPECT_EQ(bad->status, 400);

    server.stop();
    worker.join();
}

TEST(ServiceHttp, PayloadLimit) {
    ServiceConfig cfg;
    cfg.max_upload_bytes = 1024;
    Service svc(cfg);
    httplib::Server server;
    svc.mount(server);
    const int port = server.bind_to_any_port("127.0.0.1");
    std::thread worker([&] { server.listen_after_bind(); });
    server.wait_until_ready();
    httplib::Client client("127.0.0.1", port);
    const auto r = client.Post("/v1/sessions", std::string(4096, 'x'), "application/octet-stream");
    ASSERT_TRUE(r);
    EXPECT_EQ(r->status, 413);
    EXPECT_EQ(svc.session_count(), 0u);
    server.stop();
    worker.join();
}
