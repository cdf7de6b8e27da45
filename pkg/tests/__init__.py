# -*- coding: utf-8 -*-
# filename: __init__.py.py
# @Time    : 2025/8/15 13:39
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
