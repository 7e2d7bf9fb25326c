#pragma once

#include <stdexcept>
#include <string>

namespace simstudy {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidSpaceError : public Error {
public:
    using Error::Error;
};

class SchemaError : public Error {
public:
    using Error::Error;
};

/// An existing table does not match the declared schema.
class SchemaMismatchError : public SchemaError {
public:
    using SchemaError::SchemaError;
};

class BlobError : public Error {
public:
    using Error::Error;
};

/// Fatal storage failure (constraint violation, malformed SQL, bad data).
class StorageError : public Error {
public:
    using Error::Error;
};

/// Transient: the store is unreachable, busy, or the connection dropped.
/// Retried by `with_retry`.
class ConnectionError : public StorageError {
public:
    using StorageError::StorageError;
};

/// Bad connection descriptor or unsupported backend.
class DsnError : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

/// A numerical solve failed (e.g. rank-deficient design).
class SolverError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened or written.
class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace simstudy
