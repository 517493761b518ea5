#pragma once

#include <stdexcept>
#include <string>

namespace corpusforge {

// Error kinds map 1:1 onto CLI exit codes.
enum class ErrorKind { Usage = 1, Data = 2, Stage = 3 };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const { return kind_; }

private:
    ErrorKind kind_;
};

[[noreturn]] inline void fail_usage(const std::string& msg) { throw Error(ErrorKind::Usage, msg); }
[[noreturn]] inline void fail_data(const std::string& msg) { throw Error(ErrorKind::Data, msg); }
[[noreturn]] inline void fail_stage(const std::string& msg) { throw Error(ErrorKind::Stage, msg); }

}  // namespace corpusforge
