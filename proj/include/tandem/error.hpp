#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace tandem {

/// Base error for everything raised by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Raised when a run configuration is invalid. Carries every problem found,
/// not just the first one, so a user can fix the file in one pass.
class ConfigError : public Error {
public:
    explicit ConfigError(std::vector<std::string> problems)
        : Error(join(problems)), problems_(std::move(problems)) {}
    explicit ConfigError(const std::string& problem)
        : ConfigError(std::vector<std::string>{problem}) {}

    const std::vector<std::string>& problems() const { return problems_; }

private:
    static std::string join(const std::vector<std::string>& ps) {
        std::string out;
        for (const auto& p : ps) {
            if (!out.empty()) out += "; ";
            out += p;
        }
        return out;
    }
    std::vector<std::string> problems_;
};

}  // namespace tandem
