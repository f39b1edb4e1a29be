"""
D2KE 工具函数包：日志、错误处理、并行、运行环境信息

Author: gngdingghuan
"""
