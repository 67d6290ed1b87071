#pragma once

namespace telsym {

// Maclaurin evaluation of the standard pair of solutions of y'' = z*y and
// their first derivatives. Both series converge everywhere; truncation keeps
// roughly 1e-13 relative accuracy for |z| <= 5, which covers every validity
// box stored in the database.
double airy_ai(double z);
double airy_bi(double z);
double airy_ai_prime(double z);
double airy_bi_prime(double z);

} // namespace telsym
