#include "histscan/article.hpp"

#include <algorithm>
#include <cstdio>
#include <regex>

#include "histscan/error.hpp"

namespace histscan {

namespace {

bool has_control_break(std::string_view s) { return s.find_first_of("\t\r\n") != std::string_view::npos; }

void require_plain(std::string_view what, std::string_view value) {
    if (has_control_break(value))
        throw Error(ErrorCode::InvalidRequest, std::string(what) + " cannot contain tabs or line breaks");
}

}  // namespace

std::string format_author(const Author& author) {
    return author.rest.empty() ? author.last_name : author.last_name + ", " + author.rest;
}

Author parse_author(std::string_view text) {
    auto trim = [](std::string_view s) {
        auto b = s.find_first_not_of(' ');
        if (b == std::string_view::npos) return std::string();
        return std::string(s.substr(b, s.find_last_not_of(' ') - b + 1));
    };
    auto comma = text.find(',');
    if (comma == std::string_view::npos) return {trim(text), ""};
    return {trim(text.substr(0, comma)), trim(text.substr(comma + 1))};
}

std::size_t Volume::position_of(const PageLabel& label) const {
    const auto* s = scan_with_label(label);
    if (!s)
        throw Error(ErrorCode::UnknownPageLabel, "no scan in volume " + id() + " carries page '" +
                                                     format_page_label(label) + "'",
                    {{"label", format_page_label(label)}});
    return static_cast<std::size_t>(s->sequence_index);
}

const ArticleRecord& Volume::article(std::string_view article_id) const {
    auto it = std::find_if(articles_.begin(), articles_.end(), [&](const auto& a) { return a.article_id == article_id; });
    if (it == articles_.end())
        throw Error(ErrorCode::UnknownArticle, "no article '" + std::string(article_id) + "'",
                    {{"article_id", std::string(article_id)}});
    return *it;
}

std::vector<const ArticleRecord*> Volume::articles_in_page_order() const {
    std::vector<const ArticleRecord*> out;
    for (const auto& a : articles_) out.push_back(&a);
    // Stable: articles sharing a first page keep entry order. Finalized
    // labels are frozen, so positions always resolve here.
    std::stable_sort(out.begin(), out.end(), [&](const auto* x, const auto* y) {
        return position_of(x->first_page) < position_of(y->first_page);
    });
    return out;
}

ArticleRecord Volume::prepare_article(ArticleFields fields) const {
    require_state(VolumeState::ArticleEntry, "create_article");
    if (fields.title.find_first_not_of(" \t\r\n") == std::string::npos)
        throw Error(ErrorCode::InvalidRequest, "article title must not be empty");
    require_plain("title", fields.title);
    for (const auto& author : fields.authors) {
        if (author.last_name.empty()) throw Error(ErrorCode::InvalidRequest, "author last name must not be empty");
        for (const auto& part : {author.last_name, author.rest}) {
            require_plain("author", part);
            if (part.find(';') != std::string::npos)
                throw Error(ErrorCode::InvalidRequest, "author names cannot contain ';'");
        }
        if (author.last_name.find(',') != std::string::npos)
            throw Error(ErrorCode::InvalidRequest, "author last names cannot contain ','");
    }

    if (fields.article_id.empty()) {
        for (std::size_t n = articles_.size() + 1;; ++n) {
            auto candidate = id() + "-a" + std::to_string(n);
            if (std::none_of(articles_.begin(), articles_.end(), [&](const auto& a) { return a.article_id == candidate; })) {
                fields.article_id = candidate;
                break;
            }
        }
    } else {
        require_plain("article id", fields.article_id);
        if (std::any_of(articles_.begin(), articles_.end(), [&](const auto& a) { return a.article_id == fields.article_id; }))
            throw Error(ErrorCode::DuplicateArticleId, "article '" + fields.article_id + "' already exists",
                        {{"article_id", fields.article_id}});
    }

    auto first = position_of(fields.first_page);
    auto last = position_of(fields.last_page);
    if (first > last)
        throw Error(ErrorCode::PageOrderViolation,
                    "first page '" + format_page_label(fields.first_page) + "' comes after last page '" +
                        format_page_label(fields.last_page) + "'",
                    {{"first_page", format_page_label(fields.first_page)},
                     {"last_page", format_page_label(fields.last_page)}});

    ArticleRecord record;
    record.article_id = std::move(fields.article_id);
    record.volume_id = id();
    record.title = std::move(fields.title);
    record.authors = std::move(fields.authors);
    // Store the labels as the volume spells them (e.g. roman numeral case).
    record.first_page = *effective_label(scans_[first].scan_id);
    record.last_page = *effective_label(scans_[last].scan_id);
    record.abstract = std::move(fields.abstract);
    return record;
}

const ArticleRecord& Volume::create_article(ArticleFields fields, std::optional<Bibcode> bibcode) {
    auto record = prepare_article(std::move(fields));
    record.bibcode = std::move(bibcode);
    articles_.push_back(std::move(record));
    bump();
    return articles_.back();
}

void Volume::remove_article(std::string_view article_id) {
    require_state(VolumeState::ArticleEntry, "remove_article");
    const auto& target = article(article_id);
    articles_.erase(articles_.begin() + (&target - articles_.data()));
    bump();
}

std::optional<YearSpan> extract_report_years(std::string_view title) {
    // Ranges may be joined by "to", a hyphen, or an en or em dash (UTF-8).
    static const std::regex pattern(R"(for\s+the\s+years?\s+(\d{4})(?:\s*(?:to|-|)"
                                    "\xE2\x80\x93|\xE2\x80\x94"
                                    R"()\s*(\d{4}))?)",
                                    std::regex::icase | std::regex::ECMAScript);
    std::match_results<std::string_view::const_iterator> m;
    if (!std::regex_search(title.begin(), title.end(), m, pattern)) return std::nullopt;
    YearSpan span;
    span.start_year = std::stoi(m[1].str());
    span.end_year = m[2].matched ? std::stoi(m[2].str()) : span.start_year;
    return span;
}

Bibcode derive_bibcode(const ArticleRecord& article, const VolumeMetadata& volume, const CodeSet& existing) {
    if (!is_valid_bibstem(volume.stem))
        throw Error(ErrorCode::StemUnresolved, "volume " + volume.volume_id + " has no journal stem");
    auto page = to_bibcode_page(article.first_page);
    Bibcode code;
    code.year = volume.publication_year;
    code.bibstem = volume.stem;
    code.volume = volume.volume;
    code.qualifier = page.qualifier;
    code.page = page.page;
    if (!article.authors.empty()) code.author_initial = author_initial(article.authors.front().last_name);
    return assign_dedup_qualifier(existing, code);
}

std::string format_journal_ref(const ArticleRecord& article, const VolumeMetadata& volume) {
    std::string out = volume.full_title + ", vol. " + volume.volume.text() + ", ";
    if (article.first_page.same_page(article.last_page))
        out += "p. " + format_page_label(article.first_page);
    else
        out += "pp. " + format_page_label(article.first_page) + "-" + format_page_label(article.last_page);
    return out;
}

std::string format_publication_date(const VolumeMetadata& volume) {
    char buffer[16];
    std::snprintf(buffer, sizeof buffer, "%02d/%04d", volume.publication_month, volume.publication_year);
    return buffer;
}

}  // namespace histscan
