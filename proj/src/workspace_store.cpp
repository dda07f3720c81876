#include "nanolog/workspace_store.hpp"

#include "nanolog/error.hpp"
#include "nanolog/parser.hpp"

#include <fstream>
#include <sstream>
#include <system_error>

namespace fs = std::filesystem;

namespace nanolog {

namespace {

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::Io, "cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

WorkspaceStore::WorkspaceStore(fs::path data_dir, std::optional<fs::path> seed_corpus)
    : dir_(std::move(data_dir)), seed_(std::move(seed_corpus)) {
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot create data dir " + dir_.string() + ": " + ec.message());
}

bool WorkspaceStore::is_valid_id(std::string_view id) {
    if (id.empty() || id.size() > 64) return false;
    for (char c : id) {
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '-')) return false;
    }
    return true;
}

fs::path WorkspaceStore::file_for(const std::string& id) const { return dir_ / (id + ".pl"); }

void WorkspaceStore::check_id(const std::string& id) const {
    if (!is_valid_id(id)) {
        throw Error(ErrorKind::InvalidId,
                    "workspace id must match [a-z0-9-]{1,64}: '" + id + "'");
    }
}

std::mutex& WorkspaceStore::lock_for(const std::string& id) const {
    std::lock_guard guard(locks_guard_);
    auto& slot = locks_[id];
    if (!slot) slot = std::make_unique<std::mutex>();
    return *slot;
}

bool WorkspaceStore::exists(const std::string& id) const {
    return is_valid_id(id) && fs::exists(file_for(id));
}

Program WorkspaceStore::load(const std::string& id) const {
    if (!exists(id)) throw Error(ErrorKind::NotFound, "no workspace '" + id + "'");
    return parse_program(read_file(file_for(id)));
}

void WorkspaceStore::store(const std::string& id, const Program& p) const {
    const fs::path target = file_for(id);
    fs::path tmp = target;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << print_program(p);
        out.flush();
        if (!out) throw Error(ErrorKind::Io, "cannot write " + tmp.string());
    }
    std::error_code ec;
    fs::rename(tmp, target, ec);
    if (ec) throw Error(ErrorKind::Io, "cannot replace " + target.string() + ": " + ec.message());
}

void WorkspaceStore::create_workspace(const std::string& id, bool seed) {
    check_id(id);
    std::lock_guard guard(lock_for(id));
    if (fs::exists(file_for(id))) {
        throw Error(ErrorKind::AlreadyExists, "workspace '" + id + "' already exists");
    }
    Program initial;
    if (seed && seed_) initial = parse_program(read_file(*seed_));
    store(id, initial);
}

ListedRule WorkspaceStore::add_rule(const std::string& id, std::string_view rule_src) {
    if (!is_valid_id(id)) throw Error(ErrorKind::NotFound, "no workspace '" + id + "'");
    std::lock_guard guard(lock_for(id));
    Program p = load(id);
    Rule r = parse_rule(rule_src);
    p.push_back(r);
    store(id, p);
    return {p.size() - 1, print_rule(r)};
}

std::vector<ListedRule> WorkspaceStore::list_rules(const std::string& id) const {
    Program p = program(id);
    std::vector<ListedRule> out;
    out.reserve(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) out.push_back({i, print_rule(p[i])});
    return out;
}

Program WorkspaceStore::program(const std::string& id) const {
    if (!is_valid_id(id)) throw Error(ErrorKind::NotFound, "no workspace '" + id + "'");
    std::lock_guard guard(lock_for(id));
    return load(id);
}

void WorkspaceStore::delete_rule(const std::string& id, std::size_t index) {
    if (!is_valid_id(id)) throw Error(ErrorKind::NotFound, "no workspace '" + id + "'");
    std::lock_guard guard(lock_for(id));
    Program p = load(id);
    if (index >= p.size()) {
        throw Error(ErrorKind::BadIndex, "rule index " + std::to_string(index) + " out of range (" +
                                             std::to_string(p.size()) + " rules)");
    }
    p.erase(p.begin() + static_cast<std::ptrdiff_t>(index));
    store(id, p);
}

}  // namespace nanolog
