#pragma once

#include <stdexcept>
#include <string>

namespace chats {

// Base of every error raised by the library. Subclasses map onto the error
// names used throughout the docs and the CLI exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class EmptyInput : public Error {
 public:
  using Error::Error;
};

class MalformedTitle : public Error {
 public:
  using Error::Error;
};

class LengthMismatch : public Error {
 public:
  using Error::Error;
};

class EmptyCandidate : public Error {
 public:
  using Error::Error;
};

class TemplateError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

class AllLinesMalformed : public Error {
 public:
  using Error::Error;
};

class DuplicateRating : public Error {
 public:
  using Error::Error;
};

class InvalidRecord : public Error {
 public:
  using Error::Error;
};

class IdMismatch : public Error {
 public:
  using Error::Error;
};

class PipelineDegenerate : public Error {
 public:
  using Error::Error;
};

// Completion backend failures. CacheMiss and AuthError are specific kinds of
// unavailability so callers that only care about "no answer" catch the base.
class BackendUnavailable : public Error {
 public:
  using Error::Error;
};

class CacheMiss : public BackendUnavailable {
 public:
  using BackendUnavailable::BackendUnavailable;
};

class AuthError : public BackendUnavailable {
 public:
  using BackendUnavailable::BackendUnavailable;
};

}  // namespace chats
