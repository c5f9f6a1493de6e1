"""
Application entry points for gricci
"""
