#include "histscan/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "httplib.h"

#include "histscan/bibcode.hpp"
#include "histscan/error.hpp"
#include "histscan/http_api.hpp"
#include "histscan/registry.hpp"
#include "histscan/service.hpp"
#include "histscan/tsv.hpp"
#include "histscan/volume_dir.hpp"

namespace histscan {

namespace fs = std::filesystem;

namespace {

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, "cannot read " + path);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

void write_text(const std::string& path, const std::string& content) {
    auto tmp = path + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out || !out.write(content.data(), static_cast<std::streamsize>(content.size())).flush())
            throw Error(ErrorCode::IoError, "cannot write " + tmp);
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) throw Error(ErrorCode::IoError, "cannot replace " + path + ": " + ec.message());
}

struct Options {
    std::string registry_path = "registry.tsv";
    std::string format = "export-block";

    std::string validate_input;
    std::string derive_dir;

    std::string resolve_title;
    std::string resolve_series;
    std::optional<int> resolve_year;
    std::optional<int> resolve_volume;

    BibstemEntry add_entry;
    std::optional<int> add_year_start, add_year_end, add_vol_start, add_vol_end;
    std::string add_predecessor, add_successor;

    std::string listen = "127.0.0.1:8080";
    std::string data_dir;
    std::string import_dir;
    std::string export_volume;
    std::string operator_name;
};

int cmd_validate(const Options& o, std::ostream&, std::ostream& err) {
    std::string content;
    if (o.validate_input == "-") {
        std::ostringstream buffer;
        buffer << std::cin.rdbuf();
        content = buffer.str();
    } else {
        content = read_text(o.validate_input);
    }
    std::size_t invalid = 0;
    err << validation_report(content, invalid);
    return invalid == 0 ? kExitOk : kExitDomainError;
}

int cmd_derive(const Options& o, std::ostream& out, std::ostream&) {
    auto registry = Registry::load(read_text(o.registry_path));
    out << derive_volume(registry, o.derive_dir, o.format == "tsv" ? OutputFormat::Tsv : OutputFormat::ExportBlock);
    return kExitOk;
}

int cmd_registry_list(const Options& o, std::ostream& out, std::ostream&) {
    out << Registry::load(read_text(o.registry_path)).serialize();
    return kExitOk;
}

int cmd_registry_resolve(const Options& o, std::ostream& out, std::ostream&) {
    auto registry = Registry::load(read_text(o.registry_path));
    out << registry.resolve(o.resolve_title,
                            o.resolve_series.empty() ? std::nullopt : std::optional<std::string_view>(o.resolve_series),
                            o.resolve_year, o.resolve_volume)
        << '\n';
    return kExitOk;
}

int cmd_registry_add(const Options& o, std::ostream& out, std::ostream&) {
    auto registry = Registry::load(read_text(o.registry_path));
    auto entry = o.add_entry;
    entry.years = {o.add_year_start, o.add_year_end};
    entry.volumes = {o.add_vol_start, o.add_vol_end};
    if (!o.add_predecessor.empty()) entry.predecessor = o.add_predecessor;
    if (!o.add_successor.empty()) entry.successor = o.add_successor;
    auto update = registry.add(std::move(entry));
    write_text(o.registry_path, update.registry.serialize());
    out << update.audit_line << '\n';
    return kExitOk;
}

int cmd_import(const Options& o, std::ostream& out, std::ostream&) {
    CaptureService service(Registry::load(read_text(o.registry_path)), fs::path(o.data_dir));
    out << import_volume(service, read_volume_dir(o.import_dir), true, o.operator_name) << '\n';
    return kExitOk;
}

int cmd_export(const Options& o, std::ostream& out, std::ostream&) {
    CaptureService service(Registry::load(read_text(o.registry_path)), fs::path(o.data_dir));
    out << service.export_file(o.export_volume);
    return kExitOk;
}

int cmd_finalize(const Options& o, std::ostream& out, std::ostream&) {
    CaptureService service(Registry::load(read_text(o.registry_path)), fs::path(o.data_dir));
    service.finalize_volume(o.export_volume, service.volume(o.export_volume).version(), o.operator_name);
    out << service.export_file(o.export_volume);
    return kExitOk;
}

int cmd_serve(const Options& o, std::ostream&, std::ostream& err) {
    auto colon = o.listen.rfind(':');
    if (colon == std::string::npos) throw Error(ErrorCode::IoError, "--listen expects host:port");
    auto host = o.listen.substr(0, colon);
    int port = std::stoi(o.listen.substr(colon + 1));
    CaptureService service(Registry::load(read_text(o.registry_path)), fs::path(o.data_dir));
    httplib::Server server;
    install_routes(server, service);
    err << "listening on " << host << ":" << port << '\n';
    if (!server.listen(host, port)) throw Error(ErrorCode::IoError, "cannot listen on " + o.listen);
    return kExitOk;
}

}  // namespace

std::string validation_report(std::string_view content, std::size_t& invalid) {
    std::string report;
    invalid = 0;
    std::size_t line_no = 0;
    for (auto line : split_lines(content)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        auto diagnostics = validate_bibcode_string(line);
        if (!diagnostics.empty()) ++invalid;
        for (const auto& d : diagnostics) {
            report += "line " + std::to_string(line_no) + ": " + std::string(to_string(d.code)) + " at chars " +
                      std::to_string(d.first) + "-" + std::to_string(d.last) + ": " + d.message + "\n";
        }
    }
    return report;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Metadata capture and bibcode tooling for scanned observatory publications", "histscan"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--registry", o.registry_path, "Journal-abbreviation registry (TSV)");
    app.add_option("--format", o.format, "Output format for derive")->check(CLI::IsMember({"tsv", "export-block"}));

    auto* validate = app.add_subcommand("validate", "Check a file of bibcodes, one per line ('-' for stdin)");
    validate->add_option("input", o.validate_input)->required();

    auto* derive = app.add_subcommand("derive", "Finalize a volume directory and print its export");
    derive->add_option("volume_dir", o.derive_dir)->required();

    auto* registry = app.add_subcommand("registry", "Inspect or extend the registry");
    registry->require_subcommand(1);
    auto* list = registry->add_subcommand("list", "Print the registry");
    auto* resolve = registry->add_subcommand("resolve", "Resolve a title to its stem");
    resolve->add_option("title", o.resolve_title)->required();
    resolve->add_option("--series", o.resolve_series);
    resolve->add_option("--year", o.resolve_year);
    resolve->add_option("--volume", o.resolve_volume);
    auto* add = registry->add_subcommand("add", "Register a new stem");
    add->add_option("--stem", o.add_entry.stem)->required();
    add->add_option("--title", o.add_entry.full_title)->required();
    add->add_option("--series", o.add_entry.series);
    add->add_option("--year-start", o.add_year_start);
    add->add_option("--year-end", o.add_year_end);
    add->add_option("--vol-start", o.add_vol_start);
    add->add_option("--vol-end", o.add_vol_end);
    add->add_option("--predecessor", o.add_predecessor);
    add->add_option("--successor", o.add_successor);

    auto* serve = app.add_subcommand("serve", "Run the HTTP API");
    serve->add_option("--listen", o.listen, "host:port");
    serve->add_option("--data", o.data_dir)->required();

    auto* import = app.add_subcommand("import", "Load a volume directory into a data directory");
    import->add_option("volume_dir", o.import_dir)->required();
    import->add_option("--data", o.data_dir)->required();
    import->add_option("--operator", o.operator_name);

    auto* finalize = app.add_subcommand("finalize", "Finalize an imported volume and print its export");
    finalize->add_option("volume_id", o.export_volume)->required();
    finalize->add_option("--data", o.data_dir)->required();
    finalize->add_option("--operator", o.operator_name);

    auto* export_cmd = app.add_subcommand("export", "Print the export file of a finalized volume");
    export_cmd->add_option("volume_id", o.export_volume)->required();
    export_cmd->add_option("--data", o.data_dir)->required();

    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitEnvironmentError;
    }

    try {
        if (*validate) return cmd_validate(o, out, err);
        if (*derive) return cmd_derive(o, out, err);
        if (*list) return cmd_registry_list(o, out, err);
        if (*resolve) return cmd_registry_resolve(o, out, err);
        if (*add) return cmd_registry_add(o, out, err);
        if (*serve) return cmd_serve(o, out, err);
        if (*import) return cmd_import(o, out, err);
        if (*finalize) return cmd_finalize(o, out, err);
        if (*export_cmd) return cmd_export(o, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        if (!e.details().empty()) err << "details: " << e.details().dump() << '\n';
        return e.code() == ErrorCode::IoError ? kExitEnvironmentError : kExitDomainError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitEnvironmentError;
    }
    return kExitEnvironmentError;
}

}  // namespace histscan
