#pragma once

#include "nanolog/term.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace nanolog {

struct ListedRule {
    std::size_t index;
    std::string text;  // canonical form
};

/// Named rule sets, one canonical program file per workspace:
/// `<data_dir>/<id>.pl`. Every mutation rewrites the file through a
/// temporary and an atomic rename, so a crash leaves the old file intact.
/// Operations on one workspace are serialized; distinct workspaces are
/// independent.
class WorkspaceStore {
public:
    /// Creates `data_dir` if missing. `seed_corpus`, when given, is a program
    /// file copied into workspaces created with `seed = true`.
    explicit WorkspaceStore(std::filesystem::path data_dir,
                            std::optional<std::filesystem::path> seed_corpus = std::nullopt);

    static bool is_valid_id(std::string_view id);

    /// Errors: InvalidId, AlreadyExists, Io, ParseError (bad seed file).
    void create_workspace(const std::string& id, bool seed = false);
    bool exists(const std::string& id) const;

    /// Appends a parsed rule; returns its index. Errors: NotFound,
    /// ParseError, BareVariableHead, Io.
    ListedRule add_rule(const std::string& id, std::string_view rule_src);
    std::vector<ListedRule> list_rules(const std::string& id) const;
    Program program(const std::string& id) const;
    /// Later rules shift down. Errors: NotFound, BadIndex.
    void delete_rule(const std::string& id, std::size_t index);

    const std::filesystem::path& data_dir() const noexcept { return dir_; }
    std::filesystem::path file_for(const std::string& id) const;

private:
    std::mutex& lock_for(const std::string& id) const;
    Program load(const std::string& id) const;
    void store(const std::string& id, const Program& p) const;
    void check_id(const std::string& id) const;

    std::filesystem::path dir_;
    std::optional<std::filesystem::path> seed_;
    mutable std::mutex locks_guard_;
    mutable std::map<std::string, std::unique_ptr<std::mutex>, std::less<>> locks_;
};

}  // namespace nanolog
