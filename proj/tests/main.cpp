#include <gtest/gtest.h>

#include "oscamp/real.hpp"

int main(int argc, char** argv)
{
    oscamp::mp_real::default_precision(oscamp::default_digits);
    ::testing::InitGoogleTest(&argc, argv);
    return RUN_ALL_TESTS();
}
