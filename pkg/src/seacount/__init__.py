"""Elkies-prime point counting, prime-order curve generation and Atkin/Elkies census."""
