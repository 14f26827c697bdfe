#pragma once

#include <stdexcept>
#include <string>

namespace qmp {

// Base class for all library errors. Contract violations carry the name of
// the violated guard as the message prefix so harness reports can echo it.
class Error : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class NotHermitian : public Error {
  public:
    explicit NotHermitian(const std::string &what) : Error("NotHermitian: " + what) {}
};

class DimensionMismatch : public Error {
  public:
    explicit DimensionMismatch(const std::string &what) : Error("DimensionMismatch: " + what) {}
};

class BadSize : public Error {
  public:
    explicit BadSize(const std::string &what) : Error("BadSize: " + what) {}
};

class SupportViolation : public Error {
  public:
    explicit SupportViolation(const std::string &what) : Error("SupportViolation: " + what) {}
};

class NotCommensurate : public Error {
  public:
    explicit NotCommensurate(const std::string &what) : Error("NotCommensurate: " + what) {}
};

class TooLarge : public Error {
  public:
    explicit TooLarge(const std::string &what) : Error("TooLarge: " + what) {}
};

class BinMisaligned : public Error {
  public:
    explicit BinMisaligned(const std::string &what) : Error("BinMisaligned: " + what) {}
};

class ZeroProbability : public Error {
  public:
    explicit ZeroProbability(const std::string &what) : Error("ZeroProbability: " + what) {}
};

class BadWeight : public Error {
  public:
    explicit BadWeight(const std::string &what) : Error("BadWeight: " + what) {}
};

class GridTooCoarse : public Error {
  public:
    explicit GridTooCoarse(const std::string &what) : Error("GridTooCoarse: " + what) {}
};

class ConfigError : public Error {
  public:
    explicit ConfigError(const std::string &what) : Error("ConfigError: " + what) {}
};

}  // namespace qmp
