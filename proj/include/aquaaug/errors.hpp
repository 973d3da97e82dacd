#pragma once

#include <stdexcept>
#include <string>

namespace aquaaug {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class WrongDepth : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Integral of T*I over the band vanished (opaque water).
class DegenerateSpectrum : public Error {
 public:
  using Error::Error;
};

class RadiusOverflow : public Error {
 public:
  using Error::Error;
};

class ShapeMismatch : public Error {
 public:
  using Error::Error;
};

class OrphanLabel : public Error {
 public:
  using Error::Error;
};

/// A label line that failed to parse. Carries the file and 1-based line number.
class MalformedLine : public Error {
 public:
  MalformedLine(std::string file, int line, const std::string& why)
      : Error(file + ":" + std::to_string(line) + ": " + why), file_(std::move(file)), line_(line) {}

  const std::string& file() const noexcept { return file_; }
  int line() const noexcept { return line_; }

 private:
  std::string file_;
  int line_;
};

class UnreadableImage : public Error {
 public:
  using Error::Error;
};

class IoFailure : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Raised when one image fails inside the pipeline; the run skips it and continues.
class StageFailure : public Error {
 public:
  StageFailure(std::string image_id, std::string stage, const std::string& cause)
      : Error(image_id + " [" + stage + "]: " + cause),
        image_id_(std::move(image_id)),
        stage_(std::move(stage)),
        cause_(cause) {}

  const std::string& image_id() const noexcept { return image_id_; }
  const std::string& stage() const noexcept { return stage_; }
  const std::string& cause() const noexcept { return cause_; }

 private:
  std::string image_id_;
  std::string stage_;
  std::string cause_;
};

}  // namespace aquaaug
