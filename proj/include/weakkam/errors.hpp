#pragma once

#include <stdexcept>
#include <string>

namespace weakkam {

// Base class for all toolkit errors. Subcommands map these to exit codes.
struct Error : std::runtime_error {
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

struct GridMismatch : Error {
    explicit GridMismatch(const std::string& what) : Error(what) {}
};

struct WindowTooSmall : Error {
    explicit WindowTooSmall(const std::string& what) : Error(what) {}
};

struct WindowSearchFailed : Error {
    explicit WindowSearchFailed(const std::string& what) : Error(what) {}
};

struct InvalidDiscount : Error {
    explicit InvalidDiscount(const std::string& what) : Error(what) {}
};

struct MaxIterExceeded : Error {
    double residual = 0.0;
    long iterations = 0;
    MaxIterExceeded(const std::string& what, double res, long iters)
        : Error(what), residual(res), iterations(iters) {}
};

struct DisconnectedGraph : Error {
    explicit DisconnectedGraph(const std::string& what) : Error(what) {}
};

struct NegativeCycle : Error {
    explicit NegativeCycle(const std::string& what) : Error(what) {}
};

struct ScheduleExhausted : Error {
    double last_gap = 0.0;
    ScheduleExhausted(const std::string& what, double gap) : Error(what), last_gap(gap) {}
};

struct ChainTooShort : Error {
    explicit ChainTooShort(const std::string& what) : Error(what) {}
};

struct NonConvexModel : Error {
    explicit NonConvexModel(const std::string& what) : Error(what) {}
};

struct UnsupportedModel : Error {
    explicit UnsupportedModel(const std::string& what) : Error(what) {}
};

struct LadderNotConverging : Error {
    explicit LadderNotConverging(const std::string& what) : Error(what) {}
};

struct InsufficientPoints : Error {
    explicit InsufficientPoints(const std::string& what) : Error(what) {}
};

struct ConfigError : Error {
    explicit ConfigError(const std::string& what) : Error(what) {}
};

}  // namespace weakkam
