#include "fracjac/errors.hpp"
