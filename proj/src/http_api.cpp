#include "histscan/http_api.hpp"

#include "httplib.h"

namespace histscan {

using nlohmann::json;

namespace {

json parse_body(const httplib::Request& req) {
    if (req.body.empty()) return json::object();
    try {
        auto body = json::parse(req.body);
        if (!body.is_object()) throw Error(ErrorCode::InvalidRequest, "request body must be a JSON object");
        return body;
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::InvalidRequest, std::string("malformed JSON: ") + e.what());
    }
}

template <typename T>
T required(const json& body, const char* key) {
    if (!body.contains(key) || body.at(key).is_null())
        throw Error(ErrorCode::InvalidRequest, std::string("missing field '") + key + "'", {{"field", key}});
    try {
        return body.at(key).get<T>();
    } catch (const json::exception&) {
        throw Error(ErrorCode::InvalidRequest, std::string("field '") + key + "' has the wrong type", {{"field", key}});
    }
}

template <typename T>
T optional(const json& body, const char* key, T fallback) {
    if (!body.contains(key) || body.at(key).is_null()) return fallback;
    return required<T>(body, key);
}

std::string operator_of(const httplib::Request& req, const json& body) {
    if (body.contains("operator") && body.at("operator").is_string()) return body.at("operator").get<std::string>();
    return req.get_header_value("X-Operator");
}

void send_json(httplib::Response& res, const json& body, int status = 200) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, const Error& e) {
    send_json(res,
              {{"error", std::string(to_string(e.code()))}, {"message", e.what()}, {"details", e.details()}},
              http_status(e.code()));
}

// Wraps a handler so domain and malformed-input failures become JSON errors.
template <typename Fn>
httplib::Server::Handler guarded(Fn fn) {
    return [fn](const httplib::Request& req, httplib::Response& res) {
        try {
            fn(req, res);
        } catch (const Error& e) {
            send_error(res, e);
        } catch (const json::exception& e) {
            send_error(res, Error(ErrorCode::InvalidRequest, e.what()));
        } catch (const std::exception& e) {
            send_error(res, Error(ErrorCode::IoError, e.what()));
        }
    };
}

json volume_summary(const Volume& v) {
    json j = volume_json(v);
    j["scan_count"] = v.scans().size();
    j["article_count"] = v.articles().size();
    return j;
}

json scan_view(const Volume& v, const ScanImage& s) {
    json j = to_json(s);
    const auto* a = v.assignment(s.scan_id);
    j["assignment"] = a ? to_json(*a) : json(nullptr);
    auto label = v.effective_label(s.scan_id);
    j["effective_label"] = label ? json(format_page_label(*label)) : json(nullptr);
    auto suggestion = v.suggest_next_label(s.scan_id);
    j["suggested_label"] = suggestion ? json(format_page_label(*suggestion)) : json(nullptr);
    return j;
}

std::vector<Author> authors_from(const json& body) {
    std::vector<Author> out;
    if (!body.contains("authors") || body.at("authors").is_null()) return out;
    if (!body.at("authors").is_array()) throw Error(ErrorCode::InvalidRequest, "'authors' must be an array");
    for (const auto& a : body.at("authors")) {
        if (a.is_string())
            out.push_back(parse_author(a.get<std::string>()));
        else
            out.push_back({required<std::string>(a, "last_name"), optional<std::string>(a, "rest", "")});
    }
    return out;
}

}  // namespace

int http_status(ErrorCode code) {
    switch (code) {
        case ErrorCode::VersionConflict: return 409;
        case ErrorCode::UnknownVolume:
        case ErrorCode::UnknownScan:
        case ErrorCode::UnknownArticle: return 404;
        case ErrorCode::InvalidRequest:
        case ErrorCode::Unparseable: return 400;
        case ErrorCode::IoError: return 500;
        default: return 422;
    }
}

void install_routes(httplib::Server& server, CaptureService& service) {
    server.Get("/volumes", guarded([&](const httplib::Request&, httplib::Response& res) {
        json out = json::array();
        for (const auto& v : service.volumes()) out.push_back(volume_summary(v));
        send_json(res, out);
    }));

    server.Post("/volumes", guarded([&](const httplib::Request& req, httplib::Response& res) {
        auto body = parse_body(req);
        VolumeRequest request;
        request.volume_id = optional<std::string>(body, "volume_id", "");
        request.full_title = required<std::string>(body, "full_title");
        request.series = optional<std::string>(body, "series", "");
        const auto& volume = body.contains("volume") ? body.at("volume") : json();
        if (volume.is_number_integer())
            request.volume = std::to_string(volume.get<int>());
        else
            request.volume = required<std::string>(body, "volume");
        request.publication_year = required<int>(body, "publication_year");
        request.publication_month = optional<int>(body, "publication_month", 0);
        send_json(res, volume_summary(service.create_volume(request, operator_of(req, body))), 201);
    }));

    server.Get("/volumes/:id", guarded([&](const httplib::Request& req, httplib::Response& res) {
        auto v = service.volume(req.path_params.at("id"));
        json j = volume_summary(v);
        j["pagination"] = to_json(v.verify_pagination());
        j["articles"] = json::array();
        for (const auto& a : v.articles()) j["articles"].push_back(to_json(a));
        send_json(res, j);
    }));

    server.Get("/volumes/:id/scans", guarded([&](const httplib::Request& req, httplib::Response& res) {
        auto v = service.volume(req.path_params.at("id"));
        json out = json::array();
        for (const auto& s : v.scans()) out.push_back(scan_view(v, s));
        send_json(res, {{"version", v.version()}, {"state", std::string(to_string(v.state()))}, {"scans", out}});
    }));

    server.Get("/scans/:id/image", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto& scan_id = req.path_params.at("id");
        auto image = service.scan_image(scan_id);
        if (!image) throw Error(ErrorCode::UnknownScan, "no image for scan '" + scan_id + "'", {{"scan_id", scan_id}});
        res.set_content(image->bytes, image->content_type);
    }));

    server.Post("/volumes/:id/pages", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        auto body = parse_body(req);
        auto action = required<std::string>(body, "action");
        auto scan_id = required<std::string>(body, "scan_id");
        auto expected = required<std::uint64_t>(body, "expected_version");
        auto who = operator_of(req, body);
        json result;
        if (action == "assign") {
            result["assignment"] = to_json(service.assign_page(id, scan_id, required<std::string>(body, "label"), expected, who));
        } else if (action == "override") {
            result["assignment"] = to_json(service.set_override(id, scan_id, required<std::string>(body, "label"),
                                                                optional<std::string>(body, "note", ""), expected, who));
        } else if (action == "mark_duplicate") {
            result["scan"] = to_json(service.mark_duplicate(id, scan_id, expected, who));
        } else if (action == "unmark_duplicate") {
            result["scan"] = to_json(service.unmark_duplicate(id, scan_id, expected, who));
        } else {
            throw Error(ErrorCode::InvalidRequest, "unknown pages action '" + action + "'", {{"action", action}});
        }
        result["version"] = service.volume(id).version();
        send_json(res, result);
    }));

    server.Post("/volumes/:id/transition", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        auto body = parse_body(req);
        auto expected = required<std::uint64_t>(body, "expected_version");
        auto to = optional<std::string>(body, "to", "ArticleEntry");
        Volume v = [&] {
            if (to == "ArticleEntry") return service.transition_to_article_mode(id, expected, operator_of(req, body));
            if (to == "PageNumbering") return service.reopen_pagination(id, expected, operator_of(req, body));
            throw Error(ErrorCode::InvalidRequest, "cannot transition to '" + to + "'");
        }();
        send_json(res, volume_summary(v));
    }));

    server.Post("/volumes/:id/articles", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        auto body = parse_body(req);
        auto expected = required<std::uint64_t>(body, "expected_version");
        ArticleFields fields;
        fields.article_id = optional<std::string>(body, "article_id", "");
        fields.title = required<std::string>(body, "title");
        fields.authors = authors_from(body);
        fields.first_page = parse_page_label(required<std::string>(body, "first_page"));
        fields.last_page = parse_page_label(required<std::string>(body, "last_page"));
        if (body.contains("abstract") && !body.at("abstract").is_null())
            fields.abstract = required<std::string>(body, "abstract");
        auto outcome = service.create_article(id, fields, expected, operator_of(req, body));
        send_json(res,
                  {{"article", to_json(outcome.article)},
                   {"version", outcome.version},
                   {"bibcode_error", outcome.bibcode_error ? *outcome.bibcode_error : json(nullptr)}},
                  201);
    }));

    server.Post("/volumes/:id/finalize", guarded([&](const httplib::Request& req, httplib::Response& res) {
        const auto& id = req.path_params.at("id");
        auto body = parse_body(req);
        auto outcome =
            service.finalize_volume(id, required<std::uint64_t>(body, "expected_version"), operator_of(req, body));
        json records = json::array();
        for (const auto& r : outcome.records) records.push_back(to_json(r));
        send_json(res, {{"records", records}, {"version", outcome.version}});
    }));

    server.Get("/volumes/:id/export", guarded([&](const httplib::Request& req, httplib::Response& res) {
        res.set_content(service.export_file(req.path_params.at("id")), "text/plain; charset=utf-8");
    }));
}

}  // namespace histscan
