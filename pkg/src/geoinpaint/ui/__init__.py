"""
User interfaces for geoinpaint.
"""
