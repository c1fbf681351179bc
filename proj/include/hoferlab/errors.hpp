#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hoferlab {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
	using std::runtime_error::runtime_error;
};

class SyntaxError : public Error
{
public:
	SyntaxError(std::size_t offset, const std::string& what)
	    : Error("syntax error at offset " + std::to_string(offset) + ": " + what), offset_(offset)
	{
	}
	std::size_t offset() const noexcept { return offset_; }

private:
	std::size_t offset_;
};

class UnknownIdentifier : public Error
{
public:
	UnknownIdentifier(std::size_t offset, const std::string& name)
	    : Error("unknown identifier '" + name + "' at offset " + std::to_string(offset)), offset_(offset), name_(name)
	{
	}
	std::size_t offset() const noexcept { return offset_; }
	const std::string& name() const noexcept { return name_; }

private:
	std::size_t offset_;
	std::string name_;
};

#define HOFERLAB_SIMPLE_ERROR(Name)                                                                                    \
	class Name : public Error                                                                                          \
	{                                                                                                                  \
	public:                                                                                                            \
		using Error::Error;                                                                                            \
	};

HOFERLAB_SIMPLE_ERROR(DomainError)
HOFERLAB_SIMPLE_ERROR(PreconditionError)
HOFERLAB_SIMPLE_ERROR(GeometryError)
HOFERLAB_SIMPLE_ERROR(NotMonotone)
HOFERLAB_SIMPLE_ERROR(SupportOverlap)
HOFERLAB_SIMPLE_ERROR(GradientUnavailable)
HOFERLAB_SIMPLE_ERROR(BlowUp)
HOFERLAB_SIMPLE_ERROR(CloudMismatch)
HOFERLAB_SIMPLE_ERROR(BudgetExceeded)
HOFERLAB_SIMPLE_ERROR(InputNotQuasiSubadditive)
HOFERLAB_SIMPLE_ERROR(QuasiTriangleViolated)
HOFERLAB_SIMPLE_ERROR(ShellUnresolved)
HOFERLAB_SIMPLE_ERROR(CertificateFailed)
HOFERLAB_SIMPLE_ERROR(ConjugationUnsupported)
HOFERLAB_SIMPLE_ERROR(FormatError)

#undef HOFERLAB_SIMPLE_ERROR

} // namespace hoferlab
