#include "histscan/tsv.hpp"

#include "histscan/error.hpp"

namespace histscan {

std::vector<std::string_view> split_lines(std::string_view content) {
    std::vector<std::string_view> lines;
    while (!content.empty()) {
        auto nl = content.find('\n');
        if (nl == std::string_view::npos) {
            lines.push_back(content);
            break;
        }
        lines.push_back(content.substr(0, nl));
        content.remove_prefix(nl + 1);
    }
    return lines;
}

std::vector<std::string_view> split_tsv(std::string_view line) {
    std::vector<std::string_view> fields;
    for (;;) {
        auto tab = line.find('\t');
        fields.push_back(line.substr(0, tab));
        if (tab == std::string_view::npos) break;
        line.remove_prefix(tab + 1);
    }
    return fields;
}

namespace {

template <typename Range>
std::string join(const Range& fields) {
    std::string out;
    bool first = true;
    for (std::string_view f : fields) {
        if (f.find_first_of("\t\r\n") != std::string_view::npos)
            throw Error(ErrorCode::InvalidRequest, "field contains a tab or newline: '" + std::string(f) + "'");
        if (!first) out += '\t';
        first = false;
        out += f;
    }
    return out;
}

}  // namespace

std::string join_tsv(std::initializer_list<std::string_view> fields) { return join(fields); }
std::string join_tsv(const std::vector<std::string>& fields) { return join(fields); }

}  // namespace histscan
