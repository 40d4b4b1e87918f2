#pragma once

#include <stdexcept>
#include <string>

namespace floodrisk {

/// Base for every error raised by the library.
class Error : public std::runtime_error
{
  public:
	using std::runtime_error::runtime_error;
};

/// Input data violates a format or an operation precondition.
class DataError : public Error
{
  public:
	using Error::Error;
};

/// A file could not be opened, read or written.
class IoError : public Error
{
  public:
	using Error::Error;
};

} // namespace floodrisk
