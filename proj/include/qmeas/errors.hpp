#pragma once

#include <stdexcept>
#include <string>

namespace qmeas {

/// Base for all library errors. Catch this to handle any rejection or
/// numerical failure coming out of qmeas.
class error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Precondition violated by the caller (bad unit, negative mass, invalid level, ...).
class invalid_input : public error
{
public:
    using error::error;
};

/// A numerical kernel did not reach its tolerance.
class numerics_error : public error
{
public:
    using error::error;
};

}  // namespace qmeas
