# -*- coding: utf-8 -*-
# filename: __init__.py
# @Time    : 2025/10/16 10:12
# @Author  : JQQ
# @Email   : jqq1716@gmail.com
# @Software: PyCharm
