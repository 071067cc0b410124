#include "histscan/workflow.hpp"

#include <algorithm>
#include <charconv>

#include "histscan/article.hpp"
#include "histscan/error.hpp"
#include "histscan/tsv.hpp"

namespace histscan {

using nlohmann::json;

namespace {

void field_line(std::string& out, std::string_view name, std::string_view value) {
    out += name;
    out += ':';
    if (!value.empty()) {
        out += ' ';
        out += value;
    }
    out += '\n';
}

[[noreturn]] void table_error(std::string_view table, std::size_t line, std::size_t column, const std::string& what) {
    throw Error(ErrorCode::ParseError,
                std::string(table) + " line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what,
                {{"file", std::string(table)}, {"line", line}, {"column", column}});
}

std::vector<std::vector<std::string_view>> table_rows(std::string_view table, std::string_view content,
                                                      std::string_view header) {
    auto lines = split_lines(content);
    if (lines.empty() || lines.front() != header) table_error(table, 1, 1, "missing or wrong header row");
    auto columns = split_tsv(header).size();
    std::vector<std::vector<std::string_view>> rows;
    for (std::size_t i = 1; i < lines.size(); ++i) {
        if (lines[i].empty()) continue;
        auto fields = split_tsv(lines[i]);
        if (fields.size() != columns)
            table_error(table, i + 1, std::min(fields.size(), columns) + 1,
                        "expected " + std::to_string(columns) + " columns, got " + std::to_string(fields.size()));
        rows.push_back(std::move(fields));
    }
    return rows;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<std::string>();
}

}  // namespace

std::string join_authors(const std::vector<Author>& authors) {
    std::string out;
    for (const auto& a : authors) {
        if (!out.empty()) out += "; ";
        out += format_author(a);
    }
    return out;
}

std::vector<Author> split_authors(std::string_view text) {
    std::vector<Author> out;
    while (!text.empty()) {
        auto semi = text.find(';');
        auto part = text.substr(0, semi);
        auto author = parse_author(part);
        if (!author.last_name.empty()) out.push_back(std::move(author));
        if (semi == std::string_view::npos) break;
        text.remove_prefix(semi + 1);
    }
    return out;
}

std::vector<ExportRecord> build_export_records(const Volume& volume) {
    if (volume.state() != VolumeState::Finalized)
        throw Error(ErrorCode::WrongState, "volume " + volume.id() + " is not finalized",
                    {{"state", std::string(to_string(volume.state()))}, {"required", "Finalized"}});
    std::vector<ExportRecord> records;
    for (const auto* a : volume.articles_in_page_order()) {
        records.push_back({format_bibcode(*a->bibcode), a->title, join_authors(a->authors),
                           format_journal_ref(*a, volume.metadata()), format_publication_date(volume.metadata()),
                           std::string(kOrigin)});
    }
    return records;
}

std::string format_export(const std::vector<ExportRecord>& records) {
    std::string out;
    for (const auto& r : records) {
        if (!out.empty()) out += '\n';
        field_line(out, "Title", r.title);
        field_line(out, "Authors", r.authors);
        field_line(out, "Journal", r.journal_ref);
        field_line(out, "Publication Date", r.pub_date);
        field_line(out, "Origin", r.origin);
        field_line(out, "Bibliographic Code", r.bibcode);
    }
    return out;
}

std::string abstract_ref(const ArticleRecord& article) {
    return article.abstract ? "abstracts/" + article.article_id + ".txt" : std::string();
}

std::string pages_tsv(const Volume& volume) {
    std::string out(kPagesHeader);
    out += '\n';
    for (const auto& s : volume.scans()) {
        const auto* a = volume.assignment(s.scan_id);
        std::string kind, label, override_text, note;
        if (a) {
            kind = to_string(a->label.kind);
            label = format_page_label(a->label);
            if (a->override_label) {
                override_text = format_page_label(a->override_label->label);
                note = a->override_label->note;
            }
        }
        out += join_tsv({s.scan_id, std::to_string(s.sequence_index), to_string(s.status), kind, label, override_text,
                         note});
        out += '\n';
    }
    return out;
}

std::string articles_tsv(const Volume& volume) {
    std::string out(kArticlesHeader);
    out += '\n';
    for (const auto& a : volume.articles()) {
        out += join_tsv({a.article_id, a.bibcode ? format_bibcode(*a.bibcode) : std::string(), a.title,
                         join_authors(a.authors), format_page_label(a.first_page), format_page_label(a.last_page),
                         abstract_ref(a)});
        out += '\n';
    }
    return out;
}

std::vector<PagesRow> parse_pages_tsv(std::string_view content) {
    std::vector<PagesRow> rows;
    std::size_t line = 1;
    for (const auto& f : table_rows("pages.tsv", content, kPagesHeader)) {
        ++line;
        PagesRow row;
        row.scan_id = std::string(f[0]);
        if (row.scan_id.empty()) table_error("pages.tsv", line, 1, "empty scan_id");
        auto [ptr, ec] = std::from_chars(f[1].data(), f[1].data() + f[1].size(), row.sequence_index);
        if (ec != std::errc{} || ptr != f[1].data() + f[1].size() || row.sequence_index < 0)
            table_error("pages.tsv", line, 2, "bad sequence_index '" + std::string(f[1]) + "'");
        try {
            row.status = scan_status_from_string(f[2]);
        } catch (const Error&) {
            table_error("pages.tsv", line, 3, "bad status '" + std::string(f[2]) + "'");
        }
        row.label_text = std::string(f[4]);
        if (!row.label_text.empty()) {
            PageLabel label;
            try {
                label = parse_page_label(row.label_text);
            } catch (const Error& e) {
                table_error("pages.tsv", line, 5, e.what());
            }
            if (f[3] != to_string(label.kind))
                table_error("pages.tsv", line, 4,
                            "label_kind '" + std::string(f[3]) + "' does not match label '" + row.label_text + "'");
        } else if (!f[3].empty()) {
            table_error("pages.tsv", line, 4, "label_kind given without label_text");
        }
        row.override_text = std::string(f[5]);
        row.override_note = std::string(f[6]);
        rows.push_back(std::move(row));
    }
    std::stable_sort(rows.begin(), rows.end(),
                     [](const auto& a, const auto& b) { return a.sequence_index < b.sequence_index; });
    for (std::size_t i = 1; i < rows.size(); ++i)
        if (rows[i].sequence_index == rows[i - 1].sequence_index)
            throw Error(ErrorCode::ParseError, "pages.tsv: sequence_index " + std::to_string(rows[i].sequence_index) +
                                                   " appears twice");
    return rows;
}

std::vector<ArticlesRow> parse_articles_tsv(std::string_view content) {
    std::vector<ArticlesRow> rows;
    for (const auto& f : table_rows("articles.tsv", content, kArticlesHeader)) {
        rows.push_back({std::string(f[0]), std::string(f[1]), std::string(f[2]), split_authors(f[3]), std::string(f[4]),
                        std::string(f[5]), std::string(f[6])});
    }
    return rows;
}

json to_json(const VolumeMetadata& m) {
    return {{"volume_id", m.volume_id},
            {"full_title", m.full_title},
            {"series", m.series},
            {"stem", m.stem},
            {"volume", m.volume.text()},
            {"publication_year", m.publication_year},
            {"publication_month", m.publication_month}};
}

json to_json(const ScanImage& s) {
    return {{"scan_id", s.scan_id},
            {"sequence_index", s.sequence_index},
            {"image_ref", s.image_ref},
            {"status", std::string(to_string(s.status))}};
}

json to_json(const PageAssignment& a) {
    json j = {{"scan_id", a.scan_id},
              {"label", format_page_label(a.label)},
              {"label_kind", std::string(to_string(a.label.kind))},
              {"effective_label", format_page_label(a.effective())},
              {"override", nullptr}};
    if (a.override_label)
        j["override"] = {{"label", format_page_label(a.override_label->label)}, {"note", a.override_label->note}};
    return j;
}

json to_json(const Author& a) { return {{"last_name", a.last_name}, {"rest", a.rest}}; }

json to_json(const ArticleRecord& a) {
    json authors = json::array();
    for (const auto& author : a.authors) authors.push_back(to_json(author));
    return {{"article_id", a.article_id},
            {"volume_id", a.volume_id},
            {"title", a.title},
            {"authors", authors},
            {"first_page", format_page_label(a.first_page)},
            {"last_page", format_page_label(a.last_page)},
            {"abstract", a.abstract ? json(*a.abstract) : json(nullptr)},
            {"bibcode", a.bibcode ? json(format_bibcode(*a.bibcode)) : json(nullptr)}};
}

json to_json(const PaginationReport& r) {
    json conflicts = json::array();
    for (const auto& c : r.conflicts) conflicts.push_back({{"label", c.label}, {"scan_ids", c.scan_ids}});
    return {{"complete", r.complete}, {"unlabeled", r.unlabeled}, {"conflicts", conflicts}};
}

json to_json(const ExportRecord& r) {
    return {{"bibcode", r.bibcode}, {"title", r.title},       {"authors", r.authors},
            {"journal_ref", r.journal_ref}, {"pub_date", r.pub_date}, {"origin", r.origin}};
}

json volume_json(const Volume& volume) {
    json j = to_json(volume.metadata());
    j["state"] = std::string(to_string(volume.state()));
    j["version"] = volume.version();
    return j;
}

void apply_event(std::optional<Volume>& volume, const json& event) {
    const auto type = event.at("type").get<std::string>();
    if (type == "VolumeCreated") {
        if (volume) throw Error(ErrorCode::IoError, "VolumeCreated event on an existing volume");
        VolumeMetadata m;
        m.volume_id = event.at("volume_id").get<std::string>();
        m.full_title = event.at("full_title").get<std::string>();
        m.series = event.at("series").get<std::string>();
        m.stem = event.at("stem").get<std::string>();
        m.volume = VolumeField::from_text(event.at("volume").get<std::string>());
        m.publication_year = event.at("publication_year").get<int>();
        m.publication_month = event.at("publication_month").get<int>();
        volume.emplace(std::move(m));
        return;
    }
    if (!volume) throw Error(ErrorCode::IoError, "event '" + type + "' before VolumeCreated");
    auto& v = *volume;
    auto scan_id = [&] { return event.at("scan_id").get<std::string>(); };
    auto label = [&] { return parse_page_label(event.at("label").get<std::string>()); };

    if (type == "ScansIngested") {
        std::vector<ScanImage> scans;
        for (const auto& s : event.at("scans"))
            scans.push_back({s.at("scan_id").get<std::string>(), 0, s.at("image_ref").get<std::string>(),
                             ScanStatus::Active});
        v.ingest_scans(scans);
    } else if (type == "PageAssigned") {
        v.assign_page(scan_id(), label());
    } else if (type == "OverrideSet") {
        v.set_override(scan_id(), label(), event.at("note").get<std::string>());
    } else if (type == "DuplicateMarked") {
        v.mark_duplicate(scan_id());
    } else if (type == "DuplicateUnmarked") {
        v.unmark_duplicate(scan_id());
    } else if (type == "ArticleModeEntered") {
        v.transition_to_article_mode();
    } else if (type == "PaginationReopened") {
        v.reopen_pagination();
    } else if (type == "ArticleCreated") {
        ArticleFields fields;
        fields.article_id = event.at("article_id").get<std::string>();
        fields.title = event.at("title").get<std::string>();
        for (const auto& a : event.at("authors"))
            fields.authors.push_back({a.at("last_name").get<std::string>(), a.at("rest").get<std::string>()});
        fields.first_page = parse_page_label(event.at("first_page").get<std::string>());
        fields.last_page = parse_page_label(event.at("last_page").get<std::string>());
        fields.abstract = optional_string(event, "abstract");
        std::optional<Bibcode> bibcode;
        if (auto code = optional_string(event, "bibcode")) bibcode = parse_bibcode(*code);
        v.create_article(std::move(fields), std::move(bibcode));
    } else if (type == "ArticleRemoved") {
        v.remove_article(event.at("article_id").get<std::string>());
    } else if (type == "VolumeFinalized") {
        std::map<std::string, Bibcode, std::less<>> codes;
        for (const auto& [id, code] : event.at("bibcodes").items()) codes.emplace(id, parse_bibcode(code.get<std::string>()));
        v.finalize(codes);
    } else {
        throw Error(ErrorCode::IoError, "unknown event type '" + type + "'");
    }
}

Volume replay_events(const std::vector<json>& events) {
    std::optional<Volume> volume;
    for (const auto& event : events) {
        apply_event(volume, event);
        auto seq = event.at("seq").get<std::uint64_t>();
        if (volume->version() != seq)
            throw Error(ErrorCode::IoError, "event log out of step: event seq " + std::to_string(seq) +
                                                " produced version " + std::to_string(volume->version()));
    }
    if (!volume) throw Error(ErrorCode::IoError, "empty event log");
    return std::move(*volume);
}

}  // namespace histscan
