#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace delphi {

/// Domain failure. `code()` is the stable machine-facing identifier
/// (e.g. "insufficient quorum"); `what()` carries detail for humans.
class Error : public std::runtime_error {
public:
    Error(std::string code, const std::string& detail = {})
        : std::runtime_error(detail.empty() ? code : code + ": " + detail),
          code_(std::move(code)) {}

    const std::string& code() const noexcept { return code_; }

private:
    std::string code_;
};

}  // namespace delphi
